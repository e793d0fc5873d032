#pragma once

// Dense complex linear algebra helpers, a fixed-step RK4 integrator,
// Gauss-Legendre quadrature and finite-difference stencils.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vessel_lab/errors.hpp"

namespace vessel_lab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using MatrixFunction = std::function<CMatrix(double)>;

inline constexpr Complex kI{0.0, 1.0};

inline constexpr double kIdentityTol = 1e-8;
inline constexpr double kPivotTol = 1e-12;
inline constexpr int kDefaultStepsPerUnit = 256;

// ---------------------------------------------------------------------------
// Matrix helpers

inline bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline bool all_finite(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

/// Frobenius norm; the norm used for every residual in the library.
inline double norm(const CMatrix& m) { return m.norm(); }

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Eigenvalues of a Hermitian matrix (the Hermitian part is used), ascending.
inline std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double min_hermitian_eigenvalue(const CMatrix& m) {
    return hermitian_eigenvalues(m).front();
}

inline std::vector<Complex> eigenvalues(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

/// Principal square root of a positive definite matrix.
inline CMatrix hermitian_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

/// Dimension of span{A^n B e : n >= 0} computed with a re-orthogonalized
/// block Arnoldi sweep. A vector is counted when its component orthogonal to
/// the current basis exceeds `rel_tol` times its length.
inline std::size_t krylov_rank(const CMatrix& a, const CMatrix& b, double rel_tol = 1e-10) {
    const Eigen::Index n = a.rows();
    std::vector<CVector> basis;
    std::vector<CVector> block;
    for (Eigen::Index j = 0; j < b.cols(); ++j) block.emplace_back(b.col(j));

    for (Eigen::Index iter = 0; iter <= n && !block.empty(); ++iter) {
        std::vector<CVector> fresh;
        for (auto v : block) {
            const double len = v.norm();
            if (len == 0.0) continue;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) v -= q.dot(v) * q;
            const double rest = v.norm();
            if (rest <= rel_tol * len) continue;
            v /= rest;
            basis.push_back(v);
            fresh.push_back(v);
            if (static_cast<Eigen::Index>(basis.size()) == n) return basis.size();
        }
        block.clear();
        for (const auto& v : fresh) block.emplace_back(a * v);
    }
    return basis.size();
}

/// Solves A X + X A^* + C = 0 through the Kronecker form. Intended for the
/// small state spaces used by fixtures; throws when A and -A^* share
/// eigenvalues.
inline CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& c) {
    const Eigen::Index n = a.rows();
    CMatrix k = CMatrix::Zero(n * n, n * n);
    const CMatrix eye = identity(n);
    const CMatrix ac = a.conjugate();
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q) {
            // column-major vec: vec(AX) = (I ⊗ A) vec X, vec(X A^*) = (conj(A) ⊗ I) vec X
            k.block(p * n, q * n, n, n) = eye(p, q) * a + ac(p, q) * eye;
        }
    Eigen::PartialPivLU<CMatrix> lu(k);
    const CMatrix& u = lu.matrixLU();
    double smallest = std::abs(u(0, 0));
    for (Eigen::Index i = 1; i < u.rows(); ++i) smallest = std::min(smallest, std::abs(u(i, i)));
    if (smallest <= kPivotTol * std::max(1.0, k.cwiseAbs().maxCoeff()))
        throw SingularityError("Lyapunov operator is singular (spec(A) meets spec(-A^*))", smallest);
    CVector rhs = -Eigen::Map<const CVector>(c.data(), n * n);
    CVector sol = lu.solve(rhs);
    CMatrix x = Eigen::Map<CMatrix>(sol.data(), n, n);
    return hermitian_part(x);
}

// ---------------------------------------------------------------------------
// Log-determinant

/// log det M from an LU factorization. The imaginary part is the plain sum of
/// pivot arguments (plus pi for an odd permutation), i.e. it is not reduced
/// to the principal branch.
inline Complex log_det(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ArgumentError("log_det: matrix must be square and non-empty");
    if (!all_finite(m)) throw ArgumentError("log_det: matrix has non-finite entries");
    Eigen::PartialPivLU<CMatrix> lu(m);
    const CMatrix& u = lu.matrixLU();
    const double scale = m.cwiseAbs().rowwise().sum().maxCoeff();
    double smallest = std::abs(u(0, 0));
    for (Eigen::Index i = 1; i < u.rows(); ++i) smallest = std::min(smallest, std::abs(u(i, i)));
    if (smallest <= kPivotTol * scale) {
        std::ostringstream os;
        os << "log_det: matrix is singular within tolerance (smallest pivot " << smallest << ")";
        throw SingularityError(os.str(), smallest);
    }
    double re = 0.0;
    double im = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        re += std::log(std::abs(u(i, i)));
        im += std::arg(u(i, i));
    }
    if (lu.permutationP().determinant() < 0) im += std::numbers::pi;
    return {re, im};
}

// ---------------------------------------------------------------------------
// Runge-Kutta 4

template <class State, class Rhs>
State rk4_step(const Rhs& rhs, double x, const State& y, double h) {
    const State k1 = rhs(x, y);
    const State k2 = rhs(x + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = rhs(x + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = rhs(x + h, State(y + h * k3));
    return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

template <class State, class Rhs>
State rk4_integrate(const Rhs& rhs, State y, double x0, double x, std::size_t steps) {
    if (steps == 0) throw ArgumentError("rk4_integrate: steps must be positive");
    const double h = (x - x0) / static_cast<double>(steps);
    if (h == 0.0) return y;
    for (std::size_t k = 0; k < steps; ++k) y = rk4_step(rhs, x0 + static_cast<double>(k) * h, y, h);
    return y;
}

inline std::size_t default_steps(double x0, double x, int per_unit = kDefaultStepsPerUnit) {
    const double n = std::ceil(std::abs(x - x0) * per_unit - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

/// Fundamental matrix of u' = coeff(x) u with value I at x0.
inline CMatrix fundamental_solution(const MatrixFunction& coeff, double x0, double x, std::size_t steps) {
    if (steps == 0) throw ArgumentError("fundamental_solution: steps must be >= 1");
    const CMatrix c0 = coeff(x0);
    if (c0.rows() != c0.cols()) throw ArgumentError("fundamental_solution: generator must be square");
    auto rhs = [&](double t, const CMatrix& u) -> CMatrix {
        CMatrix c = coeff(t);
        if (!all_finite(c)) {
            std::ostringstream os;
            os << "fundamental_solution: non-finite generator value at x=" << t;
            throw IntegrationError(os.str());
        }
        return c * u;
    };
    CMatrix phi = rk4_integrate<CMatrix>(rhs, identity(c0.rows()), x0, x, steps);
    if (!all_finite(phi)) throw IntegrationError("fundamental_solution: solution overflowed");
    return phi;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw ArgumentError("gauss_legendre: n must be >= 1");
    if (!(a < b)) throw ArgumentError("gauss_legendre: need a < b");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        if (n == 1) {
            z = 0.0;
            dp = 1.0;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = mid - half * z;
        rule.nodes[n - 1 - i] = mid + half * z;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Finite differences

/// Sample points and weights of a 4th-order difference formula:
/// f^{(k)}(x) ≈ Σ weights[i] f(points[i]).
struct Stencil {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Central seven-point sixth-order stencil where [x-3h, x+3h] fits in [lo, hi],
/// otherwise the one-sided sixth-order formula pointing into the interval.
inline Stencil first_derivative_stencil(double x, double h, double lo, double hi) {
    const double eps = 1e-12 * std::max(1.0, std::abs(x));
    Stencil s;
    if (x - 3 * h >= lo - eps && x + 3 * h <= hi + eps) {
        s.points = {x - 3 * h, x - 2 * h, x - h, x + h, x + 2 * h, x + 3 * h};
        s.weights = {-1.0, 9.0, -45.0, 45.0, -9.0, 1.0};
    } else if (x + 6 * h <= hi + eps) {
        s.points = {x, x + h, x + 2 * h, x + 3 * h, x + 4 * h, x + 5 * h, x + 6 * h};
        s.weights = {-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0};
    } else if (x - 6 * h >= lo - eps) {
        s.points = {x, x - h, x - 2 * h, x - 3 * h, x - 4 * h, x - 5 * h, x - 6 * h};
        s.weights = {147.0, -360.0, 450.0, -400.0, 225.0, -72.0, 10.0};
    } else {
        throw DomainError("finite difference stencil does not fit in the interval");
    }
    for (auto& w : s.weights) w /= 60.0 * h;
    return s;
}

inline Stencil second_derivative_stencil(double x, double h, double lo, double hi) {
    const double eps = 1e-12 * std::max(1.0, std::abs(x));
    Stencil s;
    if (x - 2 * h >= lo - eps && x + 2 * h <= hi + eps) {
        s.points = {x - 2 * h, x - h, x, x + h, x + 2 * h};
        s.weights = {-1.0, 16.0, -30.0, 16.0, -1.0};
    } else if (x + 5 * h <= hi + eps) {
        s.points = {x, x + h, x + 2 * h, x + 3 * h, x + 4 * h, x + 5 * h};
        s.weights = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
    } else if (x - 5 * h >= lo - eps) {
        s.points = {x, x - h, x - 2 * h, x - 3 * h, x - 4 * h, x - 5 * h};
        s.weights = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
    } else {
        throw DomainError("finite difference stencil does not fit in the interval");
    }
    for (auto& w : s.weights) w /= 12.0 * h * h;
    return s;
}

/// Derivative stencils have weights summing to zero, so values are taken
/// relative to f(points[0]); constants then give exactly zero.
template <class F>
auto apply_stencil(const Stencil& s, F&& f) {
    using T = std::decay_t<decltype(f(s.points[0]))>;
    const T ref = f(s.points[0]);
    T acc = T(0.0 * ref);
    for (std::size_t i = 1; i < s.points.size(); ++i) acc = T(acc + s.weights[i] * T(f(s.points[i]) - ref));
    return acc;
}

template <class F>
auto derivative(F&& f, double x, double h, double lo, double hi) {
    return apply_stencil(first_derivative_stencil(x, h, lo, hi), std::forward<F>(f));
}

template <class F>
auto second_derivative(F&& f, double x, double h, double lo, double hi) {
    return apply_stencil(second_derivative_stencil(x, h, lo, hi), std::forward<F>(f));
}

// ---------------------------------------------------------------------------
// Grid functions

/// Matrix samples on a strictly increasing grid.
struct GridFunction {
    std::vector<double> x;
    std::vector<CMatrix> values;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }

    void push_back(double at, CMatrix value) {
        if (!x.empty() && !(at > x.back())) throw ArgumentError("GridFunction: grid must be strictly increasing");
        if (!values.empty() && (value.rows() != values.front().rows() || value.cols() != values.front().cols()))
            throw ArgumentError("GridFunction: all values must share one shape");
        x.push_back(at);
        values.push_back(std::move(value));
    }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

}  // namespace vessel_lab
