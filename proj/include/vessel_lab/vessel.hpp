#pragma once

// Vessel state (A, B(x), X(x)) with an eagerly populated uniform cache, the
// standard construction, residuals of the four vessel conditions and the
// classification flags.

#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "vessel_lab/errors.hpp"
#include "vessel_lab/numerics.hpp"
#include "vessel_lab/parameters.hpp"

namespace vessel_lab {

struct ConstructionOptions {
    int steps_per_unit = kDefaultStepsPerUnit;
    double validity_tol = 1e-10;
    double lyapunov_tol = 1e-10;
};

class Vessel;
Vessel standard_construction(const VesselParameters& params, const CMatrix& A, const CMatrix& B0,
                             const CMatrix& X0, double x0, const ConstructionOptions& opts = {});

class Vessel {
public:
    struct State {
        CMatrix B;
        CMatrix X;
    };

    Eigen::Index dim_H() const { return s_->A.rows(); }
    Eigen::Index dim_E() const { return s_->params.dim_E; }
    const VesselParameters& params() const { return s_->params; }
    Family family() const { return s_->params.family; }
    const CMatrix& A() const { return s_->A; }
    const CMatrix& B0() const { return s_->B0; }
    const CMatrix& X0() const { return s_->X0; }
    double x0() const { return s_->x0; }
    /// Cache spacing; also the step of every finite-difference stencil.
    double step() const { return s_->h; }
    const ConstructionOptions& options() const { return s_->opts; }
    /// Right end of the sub-interval on which X(x) stays invertible.
    double x_max() const { return s_->x_max; }
    bool truncated() const { return s_->x_max < s_->params.interval.b - 1e-12; }
    Interval valid_interval() const { return {s_->x0, s_->x_max}; }
    const std::vector<std::string>& warnings() const { return s_->warnings; }
    const std::vector<Complex>& spectrum() const { return s_->spectrum; }
    const GridFunction& b_cache() const { return s_->b_cache; }
    const GridFunction& x_cache() const { return s_->x_cache; }

    CMatrix sigma1(double x) const { return s_->params.constant ? s_->s1 : s_->params.sigma1(x); }
    CMatrix sigma1_inv(double x) const { return s_->params.constant ? s_->s1_inv : CMatrix(s_->params.sigma1(x).inverse()); }
    CMatrix sigma2(double x) const { return s_->params.constant ? s_->s2 : s_->params.sigma2(x); }
    CMatrix gamma(double x) const { return s_->params.constant ? s_->g : s_->params.gamma(x); }

    /// Throws DomainError outside [x0, b] and IntervalError past x_max.
    void check_domain(double x) const {
        const double eps = 1e-12 * std::max(1.0, std::abs(x));
        if (!(x >= s_->x0 - eps) || !(x <= s_->params.interval.b + eps)) {
            std::ostringstream os;
            os << "x=" << x << " outside the vessel domain [" << s_->x0 << ", " << s_->params.interval.b << "]";
            throw DomainError(os.str());
        }
        if (x > s_->x_max + eps) {
            std::ostringstream os;
            os << "x=" << x << " beyond the interval of validity (X(x) singular past " << s_->x_max << ")";
            throw IntervalError(os.str());
        }
    }

    /// (B(x), X(x)) from the cache, or one RK4 step from the nearest node.
    State state(double x) const {
        check_domain(x);
        const double t = (x - s_->x0) / s_->h;
        auto k = static_cast<std::size_t>(std::llround(std::max(0.0, t)));
        k = std::min(k, s_->b_cache.size() - 1);
        const double xk = s_->b_cache.x[k];
        if (std::abs(x - xk) <= 1e-12 * std::max(1.0, std::abs(x)))
            return {s_->b_cache.values[k], s_->x_cache.values[k]};
        CMatrix packed = step_packed(pack(s_->b_cache.values[k], s_->x_cache.values[k]), xk, x - xk);
        return unpack(packed);
    }

    CMatrix B(double x) const { return state(x).B; }
    CMatrix X(double x) const { return state(x).X; }

    /// Right-hand side of the B equation, B' = -(A B sigma2 + B(gamma + sigma1')) sigma1^{-1}.
    CMatrix B_prime(double x, const CMatrix& b) const {
        const CMatrix s1p = s_->params.constant ? CMatrix::Zero(dim_E(), dim_E()) : s_->params.sigma1_prime(x);
        return -(s_->A * b * sigma2(x) + b * (gamma(x) + s1p)) * sigma1_inv(x);
    }

    /// M(x) = B^* X^{-1} B.
    CMatrix moment(double x) const { return moment_of(x, state(x)); }

    CMatrix moment_of(double x, const State& st) const {
        const CMatrix xinv_b = solve_X(x, st.X, st.B);
        return hermitian_part(st.B.adjoint() * xinv_b);
    }

    /// Exact derivative of M through the vessel equations:
    /// M' = B'^* X^{-1} B + B^* X^{-1} B' - M sigma2 M.
    CMatrix moment_derivative(double x) const {
        const State st = state(x);
        const CMatrix bp = B_prime(x, st.B);
        const CMatrix xinv_b = solve_X(x, st.X, st.B);
        const CMatrix m = hermitian_part(st.B.adjoint() * xinv_b);
        const CMatrix cross = bp.adjoint() * xinv_b;
        return hermitian_part(cross + cross.adjoint() - m * sigma2(x) * m);
    }

    /// Output coupling from the linkage formula, gamma + N - N^* with N = sigma2 M sigma1.
    CMatrix gamma_star(double x) const {
        const CMatrix n = sigma2(x) * moment(x) * sigma1(x);
        return gamma(x) + (n - n.adjoint());
    }

    /// X^{-1} rhs; IntervalError when X is numerically singular.
    CMatrix solve_X(double x, const CMatrix& X, const CMatrix& rhs) const {
        Eigen::PartialPivLU<CMatrix> lu(X);
        const CMatrix& u = lu.matrixLU();
        double smallest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < u.rows(); ++i) smallest = std::min(smallest, std::abs(u(i, i)));
        if (smallest <= kPivotTol * std::max(1.0, X.cwiseAbs().maxCoeff())) {
            std::ostringstream os;
            os << "X(x) is singular at x=" << x;
            throw IntervalError(os.str());
        }
        return lu.solve(rhs);
    }

private:
    struct Impl {
        VesselParameters params;
        CMatrix A, B0, X0;
        double x0 = 0.0;
        double h = 0.0;
        double x_max = 0.0;
        ConstructionOptions opts;
        GridFunction b_cache, x_cache;
        std::vector<std::string> warnings;
        std::vector<Complex> spectrum;
        CMatrix s1, s1_inv, s2, g;
    };

    explicit Vessel(std::shared_ptr<const Impl> s) : s_(std::move(s)) {}

    CMatrix pack(const CMatrix& b, const CMatrix& x) const {
        CMatrix p(dim_H(), dim_E() + dim_H());
        p << b, x;
        return p;
    }

    State unpack(const CMatrix& p) const {
        return {p.leftCols(dim_E()), hermitian_part(p.rightCols(dim_H()))};
    }

    CMatrix rhs_packed(double x, const CMatrix& p) const {
        const CMatrix b = p.leftCols(dim_E());
        return pack(B_prime(x, b), b * sigma2(x) * b.adjoint());
    }

    CMatrix step_packed(const CMatrix& p, double x, double dx) const {
        auto rhs = [this](double t, const CMatrix& y) { return rhs_packed(t, y); };
        CMatrix out = rk4_step<CMatrix>(rhs, x, p, dx);
        out.rightCols(dim_H()) = hermitian_part(out.rightCols(dim_H()));
        return out;
    }

    friend Vessel standard_construction(const VesselParameters&, const CMatrix&, const CMatrix&, const CMatrix&,
                                        double, const ConstructionOptions&);

    std::shared_ptr<const Impl> s_;
};

inline double lyapunov_residual(const CMatrix& A, const CMatrix& X, const CMatrix& B, const CMatrix& sigma1) {
    return norm(A * X + X * A.adjoint() + B * sigma1 * B.adjoint());
}

/// Builds the vessel, populates the cache on [x0, interval.b] and records the
/// largest sub-interval on which X(x) stays invertible.
inline Vessel standard_construction(const VesselParameters& params, const CMatrix& A, const CMatrix& B0,
                                    const CMatrix& X0, double x0, const ConstructionOptions& opts) {
    const Eigen::Index n = A.rows();
    if (n == 0 || A.cols() != n) throw ArgumentError("A must be square and non-empty");
    if (B0.rows() != n || B0.cols() != params.dim_E) throw ArgumentError("B0 must be dim_H x dim_E");
    if (X0.rows() != n || X0.cols() != n) throw ArgumentError("X0 must be dim_H x dim_H");
    if (opts.steps_per_unit < 1) throw ArgumentError("steps_per_unit must be >= 1");
    if (!params.interval.contains(x0) || x0 >= params.interval.b)
        throw ArgumentError("x0 must lie in [a, b) of the parameter interval");
    if (!all_finite(A) || !all_finite(B0) || !all_finite(X0)) throw ArgumentError("non-finite vessel data");
    if (!is_hermitian(X0, 1e-12 * std::max(1.0, X0.cwiseAbs().maxCoeff())))
        throw PreconditionError("X0 is not Hermitian", (X0 - X0.adjoint()).cwiseAbs().maxCoeff());

    auto impl = std::make_shared<Vessel::Impl>();
    impl->params = params;
    impl->A = A;
    impl->B0 = B0;
    impl->X0 = hermitian_part(X0);
    impl->x0 = x0;
    impl->opts = opts;
    impl->s1 = params.sigma1(x0);
    impl->s1_inv = impl->s1.inverse();
    impl->s2 = params.sigma2(x0);
    impl->g = params.gamma(x0);
    impl->spectrum = eigenvalues(A);

    const double lyap = lyapunov_residual(A, impl->X0, B0, params.sigma1(x0));
    if (lyap > opts.lyapunov_tol) {
        std::ostringstream os;
        os << "Lyapunov residual at x0 is " << lyap << " (tolerance " << opts.lyapunov_tol << ")";
        throw PreconditionError(os.str(), lyap);
    }
    {
        const auto ev = hermitian_eigenvalues(impl->X0);
        double smallest = std::numeric_limits<double>::infinity();
        for (double e : ev) smallest = std::min(smallest, std::abs(e));
        if (smallest <= opts.validity_tol) throw PreconditionError("X0 is singular", smallest);
    }

    const double span = params.interval.b - x0;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span * opts.steps_per_unit - 1e-9)));
    impl->h = span / static_cast<double>(steps);
    impl->b_cache.x.reserve(steps + 1);
    impl->b_cache.values.reserve(steps + 1);
    impl->x_cache.x.reserve(steps + 1);
    impl->x_cache.values.reserve(steps + 1);
    impl->b_cache.push_back(x0, B0);
    impl->x_cache.push_back(x0, impl->X0);
    impl->x_max = x0;

    Vessel v(impl);
    CMatrix packed = v.pack(B0, impl->X0);
    auto negatives = [](const std::vector<double>& ev) {
        int neg = 0;
        for (double e : ev) neg += e < 0.0 ? 1 : 0;
        return neg;
    };
    int prev_negative = negatives(hermitian_eigenvalues(impl->X0));
    for (std::size_t k = 0; k < steps; ++k) {
        const double xk = x0 + static_cast<double>(k) * impl->h;
        const double xn = (k + 1 == steps) ? params.interval.b : x0 + static_cast<double>(k + 1) * impl->h;
        CMatrix next = v.step_packed(packed, xk, xn - xk);
        if (!all_finite(next)) {
            std::ostringstream os;
            os << "integration overflow at x=" << xn << "; interval truncated to [" << x0 << ", " << xk << "]";
            impl->warnings.push_back(os.str());
            break;
        }
        const auto st = v.unpack(next);
        const auto ev = hermitian_eigenvalues(st.X);
        double smallest = std::numeric_limits<double>::infinity();
        for (double e : ev) smallest = std::min(smallest, std::abs(e));
        // an eigenvalue may cross zero between two nodes without coming close to it
        if (smallest <= opts.validity_tol || !std::isfinite(smallest) || negatives(ev) != prev_negative) {
            std::ostringstream os;
            os << "X(x) loses invertibility near x=" << xn << "; interval truncated to [" << x0 << ", " << xk << "]";
            impl->warnings.push_back(os.str());
            break;
        }
        impl->b_cache.push_back(xn, st.B);
        impl->x_cache.push_back(xn, st.X);
        impl->x_max = xn;
        packed = std::move(next);
    }
    return v;
}

/// Integrates B alone from x0 to x with the given number of RK4 steps,
/// independent of the cache.
inline CMatrix evolve_B(const Vessel& v, double x, std::size_t steps) {
    if (steps == 0) throw ArgumentError("evolve_B: steps must be >= 1");
    if (!v.params().interval.contains(x) || x < v.x0() - 1e-12)
        throw DomainError("evolve_B: x outside the vessel domain");
    auto rhs = [&v](double t, const CMatrix& b) { return v.B_prime(t, b); };
    return rk4_integrate<CMatrix>(rhs, v.B0(), v.x0(), x, steps);
}

inline CMatrix evolve_B(const Vessel& v, double x) { return v.B(x); }

inline CMatrix evolve_X(const Vessel& v, double x) { return v.X(x); }

struct VesselResiduals {
    double db = 0.0;
    double lyapunov = 0.0;
    double dx = 0.0;
    double linkage = 0.0;

    double max() const { return std::max({db, lyapunov, dx, linkage}); }
};

namespace detail {

inline Stencil vessel_stencil(const Vessel& v, double x) {
    return first_derivative_stencil(x, v.step(), v.x0(), v.x_max());
}

}  // namespace detail

/// Explicit family form of gamma_* evaluated from the vessel's moments, or an
/// empty matrix for families that have none.
inline CMatrix family_gamma_star(const Vessel& v, double x) {
    switch (v.family()) {
        case Family::SL: {
            const CMatrix s2 = v.sigma2(x);
            const Complex beta = -(s2 * v.moment(x)).trace();
            const Complex beta_p = -(s2 * v.moment_derivative(x)).trace();
            return sl_gamma_star(beta, beta_p);
        }
        case Family::NLS: return nls_gamma_star(v.moment(x)(0, 1));
        case Family::NLS4: {
            const CMatrix m = v.moment(x);
            CMatrix g = CMatrix::Zero(4, 4);
            g.topRightCorner(2, 2) = m.topRightCorner(2, 2);
            g.bottomLeftCorner(2, 2) = -m.topRightCorner(2, 2).adjoint();
            return g;
        }
        case Family::Canonical: {
            const CMatrix m = v.moment(x);
            return canonical_gamma_star(2.0 * m(0, 1).real(), (m(1, 1) - m(0, 0)).real());
        }
        case Family::Custom: break;
    }
    return {};
}

/// Norms of the four condition residuals at x. Derivatives use 4th-order
/// differences with the cache spacing.
inline VesselResiduals vessel_residuals(const Vessel& v, double x) {
    v.check_domain(x);
    VesselResiduals r;
    const Vessel::State st = v.state(x);
    const CMatrix s1 = v.sigma1(x);
    const CMatrix s2 = v.sigma2(x);
    const Stencil sten = detail::vessel_stencil(v, x);

    const CMatrix d_bs1 = apply_stencil(sten, [&](double t) { return CMatrix(v.B(t) * v.sigma1(t)); });
    r.db = norm(d_bs1 + v.A() * st.B * s2 + st.B * v.gamma(x));
    r.lyapunov = lyapunov_residual(v.A(), st.X, st.B, s1);
    const CMatrix dX = apply_stencil(sten, [&](double t) { return v.X(t); });
    r.dx = norm(dX - st.B * s2 * st.B.adjoint());

    const CMatrix gs = v.gamma_star(x);
    const CMatrix s1p = v.params().sigma1_prime(x);
    double link = norm(gs + gs.adjoint() + s1p);
    if (v.params().gamma_star) {
        link = std::max(link, norm(gs - v.params().gamma_star(x)));
    } else {
        const CMatrix fam = family_gamma_star(v, x);
        if (fam.size() > 0) link = std::max(link, norm(gs - fam));
    }
    r.linkage = link;
    return r;
}

struct VesselClassification {
    bool dissipative = false;
    bool minimal = false;
    double m_A = 0.0;
    /// Number of negative eigenvalues of X(x) at each grid point.
    std::vector<int> negative_squares;
};

inline VesselClassification classify(const Vessel& v, const std::vector<double>& grid) {
    VesselClassification c;
    c.dissipative = true;
    for (double x : grid) {
        const auto ev = hermitian_eigenvalues(v.X(x));
        int neg = 0;
        for (double e : ev) neg += e < 0.0 ? 1 : 0;
        c.negative_squares.push_back(neg);
        if (ev.front() <= 0.0) c.dissipative = false;
    }
    c.minimal = krylov_rank(v.A(), v.B0()) == static_cast<std::size_t>(v.dim_H());
    c.m_A = -std::numeric_limits<double>::infinity();
    for (const auto& z : v.spectrum()) c.m_A = std::max(c.m_A, z.imag());
    return c;
}

/// Cache grid of the valid interval, thinned to at most `max_points` nodes.
inline std::vector<double> cache_grid(const Vessel& v, std::size_t max_points = 64) {
    const auto& xs = v.b_cache().x;
    const std::size_t stride = std::max<std::size_t>(1, (xs.size() + max_points - 1) / max_points);
    std::vector<double> out;
    for (std::size_t i = 0; i < xs.size(); i += stride) out.push_back(xs[i]);
    if (out.back() != xs.back()) out.push_back(xs.back());
    return out;
}

inline VesselClassification classify(const Vessel& v) { return classify(v, cache_grid(v)); }

/// Similarity with V = sqrt(X0) bringing X(x0) to the identity.
inline Vessel normalize_X0(const Vessel& v) {
    const auto ev = hermitian_eigenvalues(v.X0());
    if (ev.front() <= 0.0) throw PreconditionError("normalize_X0: X0 is not positive definite", ev.front());
    const CMatrix V = hermitian_sqrt(v.X0());
    const CMatrix Vinv = V.inverse();
    return standard_construction(v.params(), Vinv * v.A() * V, Vinv * v.B0(), identity(v.dim_H()), v.x0(),
                                 v.options());
}

}  // namespace vessel_lab
