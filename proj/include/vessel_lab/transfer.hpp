#pragma once

// Transfer function S(lambda, x) = I - B^* X^{-1} (lambda I - A)^{-1} B sigma1,
// the input/output fundamental solutions and the identity checkers.

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "vessel_lab/vessel.hpp"

namespace vessel_lab {

inline constexpr double kResolventGuard = 1e-8;

inline double spectrum_distance(const Vessel& v, Complex lambda) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& mu : v.spectrum()) d = std::min(d, std::abs(lambda - mu));
    return d;
}

inline void check_resolvent(const Vessel& v, Complex lambda) {
    const double d = spectrum_distance(v, lambda);
    if (d <= kResolventGuard) {
        std::ostringstream os;
        os << "lambda=" << lambda << " lies within " << kResolventGuard << " of spec(A)";
        throw ResolventError(os.str(), d);
    }
}

/// (lambda I - A)^{-1} rhs.
inline CMatrix resolvent_apply(const Vessel& v, Complex lambda, const CMatrix& rhs) {
    check_resolvent(v, lambda);
    const CMatrix m = lambda * identity(v.dim_H()) - v.A();
    return m.partialPivLu().solve(rhs);
}

inline CMatrix transfer_matrix(const Vessel& v, Complex lambda, double x) {
    check_resolvent(v, lambda);
    const Vessel::State st = v.state(x);
    const CMatrix r = resolvent_apply(v, lambda, st.B * v.sigma1(x));
    const CMatrix S = identity(v.dim_E()) - st.B.adjoint() * v.solve_X(x, st.X, r);
    if (!all_finite(S)) throw ResolventError("transfer function is not finite", spectrum_distance(v, lambda));
    return S;
}

/// sigma1^{-1}(sigma2 lambda + gamma): the input equation u' = C u.
inline CMatrix input_generator(const Vessel& v, Complex lambda, double x) {
    return v.sigma1_inv(x) * (lambda * v.sigma2(x) + v.gamma(x));
}

inline CMatrix output_generator(const Vessel& v, Complex lambda, double x) {
    return v.sigma1_inv(x) * (lambda * v.sigma2(x) + v.gamma_star(x));
}

/// Fundamental matrix of u' = coeff u (identity at x0) at each of `points`,
/// integrated once through the sorted points. Every leg uses
/// ceil(length * steps_per_unit) RK4 steps.
inline std::vector<CMatrix> fundamental_along(const MatrixFunction& coeff, double x0,
                                              const std::vector<double>& points, int steps_per_unit) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });
    std::vector<CMatrix> out(points.size());
    const CMatrix start = coeff(x0);
    CMatrix cur = identity(start.rows());
    double at = x0;
    auto rhs = [&](double t, const CMatrix& u) -> CMatrix {
        CMatrix c = coeff(t);
        if (!all_finite(c)) throw IntegrationError("non-finite generator value");
        return c * u;
    };
    for (auto idx : order) {
        const double target = points[idx];
        if (target < x0 - 1e-12) throw DomainError("fundamental_along: points must not precede x0");
        if (target > at) {
            cur = rk4_integrate<CMatrix>(rhs, cur, at, target, default_steps(at, target, steps_per_unit));
            at = target;
        }
        out[idx] = cur;
    }
    return out;
}

struct FundamentalPair {
    Complex lambda;
    MatrixFunction Phi;
    MatrixFunction PhiStar;
};

inline FundamentalPair fundamental_pair(const Vessel& v, Complex lambda) {
    FundamentalPair fp;
    fp.lambda = lambda;
    const int spu = v.options().steps_per_unit;
    fp.Phi = [v, lambda, spu](double x) {
        return fundamental_solution([&](double t) { return input_generator(v, lambda, t); }, v.x0(), x,
                                    default_steps(v.x0(), x, spu));
    };
    fp.PhiStar = [v, lambda, spu](double x) {
        return fundamental_solution([&](double t) { return output_generator(v, lambda, t); }, v.x0(), x,
                                    default_steps(v.x0(), x, spu));
    };
    return fp;
}

inline double check_symmetry(const Vessel& v, Complex lambda, double x) {
    const CMatrix s1 = v.sigma1(x);
    const CMatrix S = transfer_matrix(v, lambda, x);
    const CMatrix Sm = transfer_matrix(v, -std::conj(lambda), x);
    return norm(Sm.adjoint() * s1 * S - s1);
}

/// Output-equation residual of y = S(lambda, .) Y Phi(lambda, ., x0) u0 at x,
/// with y' from a 4th-order difference on the cache spacing, divided by
/// max(1, |y(x)|). `right` is an optional constant factor Y (identity when absent).
inline double check_intertwine(const Vessel& v, Complex lambda, double x, const CVector& u0,
                               const std::optional<CMatrix>& right = std::nullopt) {
    v.check_domain(x);
    if (u0.size() != v.dim_E()) throw ArgumentError("check_intertwine: u0 must have dim_E entries");
    const Stencil st = first_derivative_stencil(x, v.step(), v.x0(), v.x_max());
    std::vector<double> pts = st.points;
    pts.push_back(x);
    const auto phis = fundamental_along([&](double t) { return input_generator(v, lambda, t); }, v.x0(), pts,
                                        v.options().steps_per_unit);
    const CMatrix Y = right.value_or(identity(v.dim_E()));
    std::vector<CVector> ys;
    for (std::size_t i = 0; i < pts.size(); ++i) ys.push_back(transfer_matrix(v, lambda, pts[i]) * Y * phis[i] * u0);
    CVector dy = CVector::Zero(v.dim_E());
    for (std::size_t i = 0; i < st.points.size(); ++i) dy += st.weights[i] * ys[i];
    const CVector& y = ys.back();
    return (-v.sigma1(x) * dy + (lambda * v.sigma2(x) + v.gamma_star(x)) * y).norm() / std::max(1.0, y.norm());
}

/// ||S(lambda, x) Phi(lambda, x, x0) - Phi_*(lambda, x, x0) S(lambda, x0)||.
inline double check_sinttw(const Vessel& v, Complex lambda, double x) {
    v.check_domain(x);
    const int spu = v.options().steps_per_unit;
    const CMatrix phi = fundamental_solution([&](double t) { return input_generator(v, lambda, t); }, v.x0(), x,
                                             default_steps(v.x0(), x, spu));
    const CMatrix phis = fundamental_solution([&](double t) { return output_generator(v, lambda, t); }, v.x0(), x,
                                              default_steps(v.x0(), x, spu));
    return norm(transfer_matrix(v, lambda, x) * phi - phis * transfer_matrix(v, lambda, v.x0()));
}

inline double check_ds(const Vessel& v, Complex lambda, double x) {
    v.check_domain(x);
    const Stencil st = first_derivative_stencil(x, v.step(), v.x0(), v.x_max());
    const CMatrix dS = apply_stencil(st, [&](double t) { return transfer_matrix(v, lambda, t); });
    const CMatrix S = transfer_matrix(v, lambda, x);
    return norm(dS - output_generator(v, lambda, x) * S + S * input_generator(v, lambda, x));
}

struct TransferSample {
    Complex lambda;
    double x = 0.0;
    CMatrix S;
    double residual_symmetry = 0.0;
    double residual_intertwine = 0.0;
    double residual_ds = 0.0;
};

/// S(lambda, x) with the three residuals filled in; u0 defaults to e_1.
inline TransferSample eval_S(const Vessel& v, Complex lambda, double x, std::optional<CVector> u0 = std::nullopt) {
    TransferSample t;
    t.lambda = lambda;
    t.x = x;
    t.S = transfer_matrix(v, lambda, x);
    t.residual_symmetry = check_symmetry(v, lambda, x);
    CVector e = u0.value_or(CVector::Unit(v.dim_E(), 0));
    t.residual_intertwine = check_intertwine(v, lambda, x, e);
    t.residual_ds = check_ds(v, lambda, x);
    return t;
}

struct DetReport {
    std::vector<Complex> det;
    double max_pairwise_deviation = 0.0;
    double stdev = 0.0;
    /// max ||det| - 1|; present only for purely imaginary lambda.
    std::optional<double> unimodularity;
};

inline DetReport det_S(const Vessel& v, Complex lambda, const std::vector<double>& xs) {
    DetReport r;
    for (double x : xs) r.det.push_back(transfer_matrix(v, lambda, x).determinant());
    if (r.det.empty()) return r;
    Complex mean = 0.0;
    for (const auto& d : r.det) mean += d;
    mean /= static_cast<double>(r.det.size());
    double var = 0.0;
    for (std::size_t i = 0; i < r.det.size(); ++i) {
        var += std::norm(r.det[i] - mean);
        for (std::size_t j = i + 1; j < r.det.size(); ++j)
            r.max_pairwise_deviation = std::max(r.max_pairwise_deviation, std::abs(r.det[i] - r.det[j]));
    }
    r.stdev = std::sqrt(var / static_cast<double>(r.det.size()));
    if (lambda.real() == 0.0) {
        double u = 0.0;
        for (const auto& d : r.det) u = std::max(u, std::abs(std::abs(d) - 1.0));
        r.unimodularity = u;
    }
    return r;
}

/// sigma1 B^* (conj(mu) - A^*)^{-1} X^{-1} (lambda - A)^{-1} B sigma1.
inline CMatrix kernel_K1(const Vessel& v, Complex lambda, Complex mu, double x) {
    const Vessel::State st = v.state(x);
    const CMatrix bs = st.B * v.sigma1(x);
    const CMatrix fl = resolvent_apply(v, lambda, bs);
    const CMatrix fm = resolvent_apply(v, mu, bs);
    return fm.adjoint() * v.solve_X(x, st.X, fl);
}

/// B^* X^{-1} (conj(mu) - A^*)^{-1} X (lambda - A)^{-1} X^{-1} B.
inline CMatrix kernel_K2(const Vessel& v, Complex lambda, Complex mu, double x) {
    const Vessel::State st = v.state(x);
    const CMatrix xb = v.solve_X(x, st.X, st.B);
    const CMatrix gl = resolvent_apply(v, lambda, xb);
    const CMatrix gm = resolvent_apply(v, mu, xb);
    return gm.adjoint() * st.X * gl;
}

/// (sigma1 - S(mu)^* sigma1 S(lambda)) / (conj(mu) + lambda); must equal K1.
inline CMatrix kernel_K1_quotient(const Vessel& v, Complex lambda, Complex mu, double x) {
    const Complex den = std::conj(mu) + lambda;
    if (std::abs(den) < 1e-12) throw ArgumentError("kernel_K1_quotient: conj(mu) + lambda vanishes");
    const CMatrix s1 = v.sigma1(x);
    return (s1 - transfer_matrix(v, mu, x).adjoint() * s1 * transfer_matrix(v, lambda, x)) / den;
}

enum class KernelKind { K1, K2 };

/// Smallest eigenvalue of the block Gram matrix [K(lambda_j, lambda_i)]_{ij}.
inline double gram_min_eigenvalue(const Vessel& v, KernelKind kind, const std::vector<Complex>& lambdas, double x) {
    const auto n = static_cast<Eigen::Index>(lambdas.size());
    const Eigen::Index e = v.dim_E();
    CMatrix g(n * e, n * e);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto li = lambdas[static_cast<std::size_t>(i)];
            const auto lj = lambdas[static_cast<std::size_t>(j)];
            g.block(i * e, j * e, e, e) = kind == KernelKind::K1 ? kernel_K1(v, lj, li, x) : kernel_K2(v, lj, li, x);
        }
    return min_hermitian_eigenvalue(g);
}

/// I + [[a, i c / lambda], [c, a]]; commutes with the SL input generator.
inline CMatrix sl_commuting_factor(Complex lambda, Complex a, Complex c) {
    CMatrix y(2, 2);
    y << 1.0 + a, kI * c / lambda, c, 1.0 + a;
    return y;
}

inline CMatrix sl_commuting_factor(Complex lambda) {
    return sl_commuting_factor(lambda, 1.0 / lambda, 1.0 / (lambda * lambda));
}

/// ||Y C - C Y|| for the input generator C at x.
inline double commutant_residual(const Vessel& v, Complex lambda, double x, const CMatrix& Y) {
    const CMatrix c = input_generator(v, lambda, x);
    return norm(Y * c - c * Y);
}

/// |lambda| ||S(lambda, x) - I|| along the ray lambda = r e^{i angle}.
inline std::vector<double> decay_products(const Vessel& v, double angle, const std::vector<double>& radii, double x) {
    std::vector<double> out;
    for (double r : radii) {
        const Complex lambda = std::polar(r, angle);
        out.push_back(r * norm(transfer_matrix(v, lambda, x) - identity(v.dim_E())));
    }
    return out;
}

}  // namespace vessel_lab
