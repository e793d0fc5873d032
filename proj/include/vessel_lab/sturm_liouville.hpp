#pragma once

// Sturm-Liouville specific tools: the explicit input fundamental matrix,
// Gelfand-Levitan kernels, Jost diagnostics h / K_S / theta_h, the solution
// phi and a Volterra iteration for the Jost solution f used as an oracle.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vessel_lab/tau.hpp"
#include "vessel_lab/transfer.hpp"

namespace vessel_lab {

/// s = sqrt(-i lambda) with Im s >= 0.
inline Complex sl_s(Complex lambda) {
    Complex s = std::sqrt(-kI * lambda);
    if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
    return s;
}

inline Complex sl_lambda(Complex s) { return kI * s * s; }

/// [[cos s d, i sin(s d)/s], [i s sin(s d), cos s d]] with d = x - x0, s^2 = -i lambda.
inline CMatrix phi_input(Complex lambda, double x, double x0) {
    const Complex s = sl_s(lambda);
    const double d = x - x0;
    const Complex z = s * d;
    Complex sinc_d;  // sin(s d) / s
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        sinc_d = d * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    } else {
        sinc_d = std::sin(z) / s;
    }
    CMatrix m(2, 2);
    m << std::cos(z), kI * sinc_d, kI * s * std::sin(z), std::cos(z);
    return m;
}

/// |-y1'' + q y1 + i lambda y1| at x for y = S(lambda, .) Phi(lambda, ., x0) u0,
/// with y1'' from a 4th-order second difference and q = 2 beta', divided by
/// max(1, |y(x)|).
inline double check_output_schrodinger(const Vessel& v, Complex lambda, double x, const CVector& u0) {
    require_sl(v, "check_output_schrodinger");
    v.check_domain(x);
    auto y = [&](double t) { return CVector(transfer_matrix(v, lambda, t) * phi_input(lambda, t, v.x0()) * u0); };
    auto y1 = [&](double t) { return y(t)(0); };
    const Complex d2 = second_derivative(y1, x, v.step(), v.x0(), v.x_max());
    const CVector yx = y(x);
    return std::abs(-d2 + potential_at(v, x) * yx(0) + kI * lambda * yx(0)) / std::max(1.0, yx.norm());
}

// ---------------------------------------------------------------------------
// Gelfand-Levitan

/// Omega(x, y) = b(x)^* X(x0)^{-1} b(y) and K(x, y) = -b(x)^* X(x)^{-1} b(y)
/// with b = B e_1. Complex valued in general.
class GLKernels {
public:
    explicit GLKernels(Vessel v) : v_(std::move(v)) {
        require_sl(v_, "gl_kernels");
        x0_inv_ = v_.X0().inverse();
    }

    const Vessel& vessel() const { return v_; }

    Complex Omega(double x, double y) const {
        return (column(x).adjoint() * x0_inv_ * column(y))(0, 0);
    }

    Complex K(double x, double y) const {
        const auto st = v_.state(x);
        const CMatrix bx = st.B.col(0);
        return -(bx.adjoint() * v_.solve_X(x, st.X, column(y)))(0, 0);
    }

private:
    CMatrix column(double x) const { return v_.B(x).col(0); }

    Vessel v_;
    CMatrix x0_inv_;
};

inline GLKernels gl_kernels(const Vessel& v) { return GLKernels(v); }

/// |K(x,y) + Omega(x,y) + int_{x0}^{x} K(x,t) Omega(t,y) dt| with a quad_n-point Gauss rule.
inline double gl_residual(const GLKernels& k, double x, double y, std::size_t quad_n) {
    const Vessel& v = k.vessel();
    if (quad_n == 0) throw ArgumentError("gl_residual: quad_n must be >= 1");
    if (y < v.x0() - 1e-12 || y > x + 1e-12) throw ArgumentError("gl_residual: need x0 <= y <= x");
    Complex integral = 0.0;
    if (x > v.x0()) {
        const auto rule = gauss_legendre(quad_n, v.x0(), x);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            integral += rule.weights[i] * k.K(x, rule.nodes[i]) * k.Omega(rule.nodes[i], y);
    }
    return std::abs(k.K(x, y) + k.Omega(x, y) + integral);
}

/// 2 d/dx K(x, x) by a 4th-order difference on the cache spacing.
inline double q_from_K(const GLKernels& k, double x) {
    const Vessel& v = k.vessel();
    return 2.0 * derivative([&](double t) { return k.K(t, t).real(); }, x, v.step(), v.x0(), v.x_max());
}

// ---------------------------------------------------------------------------
// Jost diagnostics

/// Produces a constant right factor Y(lambda) applied as S(lambda, x) Y(lambda).
using RightFactor = std::function<CMatrix(Complex)>;

struct JostDiagnostics {
    Complex s;
    Complex h;
    double theta_h = 0.0;
    double K_S = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline CMatrix jost_transfer(const Vessel& v, Complex s, double x, const RightFactor& right) {
    const Complex lambda = sl_lambda(s);
    CMatrix S = transfer_matrix(v, lambda, x);
    if (right) S = S * right(lambda);
    return S;
}

inline CVector jost_vector(Complex s) {
    CVector w(2);
    w << 1.0, s;
    return w;
}

}  // namespace detail

/// h = e_1^T S(lambda, x) [1; s] with lambda = i s^2.
inline Complex jost_h_value(const Vessel& v, Complex s, double x, const RightFactor& right = {}) {
    return (detail::jost_transfer(v, s, x, right) * detail::jost_vector(s))(0);
}

/// K_S = [1, conj(s)] S^* sigma1 S [1; s] / (lambda + conj(lambda)). Evaluated
/// through the kernel K1 so that Re s = 0 needs no limit.
inline double jost_K_S(const Vessel& v, Complex s, double x, const RightFactor& right = {}) {
    require_sl(v, "jost_K_S");
    const Complex lambda = sl_lambda(s);
    if (s.imag() <= 0.0) throw ArgumentError("jost_K_S: need Im s > 0");
    CVector w = detail::jost_vector(s);
    if (right) w = right(lambda) * w;
    // w is a multiple c [1; s] when Y commutes with the input generator
    const Complex c = w(0);
    const double off = (w - c * detail::jost_vector(s)).norm();
    double ks;
    if (off <= 1e-10 * std::max(1.0, w.norm())) {
        ks = -std::norm(c) / (2.0 * s.imag());
    } else {
        const Complex den = lambda + std::conj(lambda);
        const CMatrix s1 = v.sigma1(x);
        ks = ((w.adjoint() * s1 * w)(0, 0) / den).real();
    }
    return ks - (w.adjoint() * kernel_K1(v, lambda, lambda, x) * w)(0, 0).real();
}

/// h and K_S at x, theta_h unwrapped by nearest continuation along the cache
/// nodes from x0 (seeded with the principal value).
inline JostDiagnostics jost_h(const Vessel& v, Complex s, double x, const RightFactor& right = {}) {
    require_sl(v, "jost_h");
    v.check_domain(x);
    JostDiagnostics d;
    d.s = s;
    const double m_A = classify(v, {v.x0()}).m_A;
    if (!(s.imag() > m_A)) {
        std::ostringstream os;
        os << "Im s = " << s.imag() << " does not exceed m(A) = " << m_A << "; asymptotic statements do not apply";
        d.warnings.push_back(os.str());
    }
    d.h = jost_h_value(v, s, x, right);
    d.K_S = jost_K_S(v, s, x, right);
    double theta = std::arg(jost_h_value(v, s, v.x0(), right));
    for (double t : v.b_cache().x) {
        if (t > x) break;
        const double a = std::arg(jost_h_value(v, s, t, right));
        theta += std::remainder(a - theta, 2.0 * std::numbers::pi);
    }
    theta += std::remainder(std::arg(d.h) - theta, 2.0 * std::numbers::pi);
    d.theta_h = theta;
    return d;
}

struct JostSweepRow {
    double x;
    Complex h;
    double theta_h;
    double K_S;
};

/// h, unwrapped theta_h and K_S along an increasing grid.
inline std::vector<JostSweepRow> jost_sweep(const Vessel& v, Complex s, const std::vector<double>& xs) {
    require_sl(v, "jost_sweep");
    std::vector<JostSweepRow> rows;
    double theta = std::arg(jost_h_value(v, s, v.x0()));
    double at = v.x0();
    for (double x : xs) {
        v.check_domain(x);
        // walk the cache between consecutive rows so the phase never jumps by more than one node
        for (double t : v.b_cache().x) {
            if (t <= at) continue;
            if (t >= x) break;
            theta += std::remainder(std::arg(jost_h_value(v, s, t)) - theta, 2.0 * std::numbers::pi);
        }
        const Complex h = jost_h_value(v, s, x);
        theta += std::remainder(std::arg(h) - theta, 2.0 * std::numbers::pi);
        at = std::max(at, x);
        rows.push_back({x, h, theta, jost_K_S(v, s, x)});
    }
    return rows;
}

struct HIdentities {
    double part1 = 0.0;
    double part2 = 0.0;
    double part3 = 0.0;
};

/// Residuals of
///  (1) conj(h(x, -conj s)) - h(x, s) / det S(lambda, x0),
///  (2) |h|^2 - [d/dx K_S + i (s - conj s) K_S],
///  (3) 2 d/dx theta_h + (s + conj s) d/dx K_S / |h|^2,
/// with derivatives by 4th-order differences on the cache spacing.
inline HIdentities check_h_identities(const Vessel& v, Complex s, double x) {
    require_sl(v, "check_h_identities");
    v.check_domain(x);
    HIdentities r;
    const Complex lambda = sl_lambda(s);
    const Complex h = jost_h_value(v, s, x);
    const Complex h_mirror = jost_h_value(v, -std::conj(s), x);
    const Complex det0 = transfer_matrix(v, lambda, v.x0()).determinant();
    r.part1 = std::abs(std::conj(h_mirror) - h / det0);

    const Stencil st = first_derivative_stencil(x, v.step(), v.x0(), v.x_max());
    const double ks = jost_K_S(v, s, x);
    const double dks = apply_stencil(st, [&](double t) { return jost_K_S(v, s, t); });
    const double h2 = std::norm(h);
    r.part2 = std::abs(h2 - (dks + (kI * (s - std::conj(s))).real() * ks));

    if (std::abs(h) < 1e-10) throw PhaseError("|h| is below 1e-10; the phase of h is undefined");
    const Complex dh = apply_stencil(st, [&](double t) { return jost_h_value(v, s, t); });
    const double dtheta = (dh * std::conj(h)).imag() / h2;
    r.part3 = std::abs(2.0 * dtheta + (s + std::conj(s)).real() * dks / h2);
    return r;
}

/// d/dx theta_h and |h|^2 at x for S replaced by S Y.
inline std::pair<double, double> jost_phase_rate(const Vessel& v, Complex s, double x, const RightFactor& right = {}) {
    const Stencil st = first_derivative_stencil(x, v.step(), v.x0(), v.x_max());
    const Complex h = jost_h_value(v, s, x, right);
    const Complex dh = apply_stencil(st, [&](double t) { return jost_h_value(v, s, t, right); });
    const double h2 = std::norm(h);
    if (std::sqrt(h2) < 1e-10) throw PhaseError("|h| is below 1e-10; the phase of h is undefined");
    return {(dh * std::conj(h)).imag() / h2, h2};
}

// ---------------------------------------------------------------------------
// phi(x, lambda) = e_1^T Phi_*(lambda, x, x0) [0; -i]

struct PhiProfile {
    std::vector<double> x;
    std::vector<Complex> phi;
    std::vector<Complex> dphi;
};

/// phi and phi' along the sorted grid xs (phi' read off the output equation).
inline PhiProfile jost_phi_profile(const Vessel& v, Complex lambda, const std::vector<double>& xs) {
    require_sl(v, "jost_phi");
    CVector start(2);
    start << 0.0, -kI;
    const auto phis = fundamental_along([&](double t) { return output_generator(v, lambda, t); }, v.x0(), xs,
                                        v.options().steps_per_unit);
    PhiProfile p;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const CVector y = phis[i] * start;
        p.x.push_back(xs[i]);
        p.phi.push_back(y(0));
        p.dphi.push_back((output_generator(v, lambda, xs[i]) * y)(0));
    }
    return p;
}

inline Complex jost_phi(const Vessel& v, Complex lambda, double x) {
    v.check_domain(x);
    return jost_phi_profile(v, lambda, {x}).phi.front();
}

// ---------------------------------------------------------------------------
// Volterra oracle for f'' = (q - s^2) f, f ~ e^{isx}

struct VolterraOptions {
    double x_min = 0.0;
    double step = 1.0 / 1024.0;
    double tol = 1e-10;
};

/// Picard iterate of the Jost equation sampled on a uniform grid, with cubic
/// Hermite interpolation between nodes.
class JostOracle {
public:
    std::vector<double> x;
    /// g = f e^{-isx} and g'.
    std::vector<Complex> g;
    std::vector<Complex> dg;
    Complex s;
    std::size_t iterations = 0;
    double last_delta = 0.0;
    /// Estimate of the neglected tail: x_max sup_{[x_max-1, x_max]} |q| / |s|.
    double tail_bound = 0.0;

    Complex operator()(double t) const { return g_at(t) * std::exp(kI * s * t); }

    Complex derivative(double t) const {
        return (dg_at(t) + kI * s * g_at(t)) * std::exp(kI * s * t);
    }

    Complex g_at(double t) const {
        const auto [i, u, h] = locate(t);
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * g[i] + (u3 - 2 * u2 + u) * h * dg[i] + (-2 * u3 + 3 * u2) * g[i + 1] +
               (u3 - u2) * h * dg[i + 1];
    }

    Complex dg_at(double t) const {
        const auto [i, u, h] = locate(t);
        const double u2 = u * u;
        return ((6 * u2 - 6 * u) * g[i] + (-6 * u2 + 6 * u) * g[i + 1]) / h + (3 * u2 - 4 * u + 1) * dg[i] +
               (3 * u2 - 2 * u) * dg[i + 1];
    }

private:
    std::tuple<std::size_t, double, double> locate(double t) const {
        if (t < x.front() - 1e-12 || t > x.back() + 1e-12) throw DomainError("JostOracle: x outside the grid");
        const double h = x[1] - x[0];
        auto i = static_cast<std::size_t>(std::floor((t - x.front()) / h));
        i = std::min(i, x.size() - 2);
        return {i, (t - x[i]) / h, h};
    }
};

/// Iterates g = 1 + (J - L)/(2is), J(x) = int_x^X e^{2is(y-x)} q g dy,
/// L(x) = int_x^X q g dy (g = f e^{-isx}), by backward trapezoid recursions.
inline JostOracle volterra_jost_oracle(const std::function<double(double)>& q, Complex s, double x_max,
                                       std::size_t iters, const VolterraOptions& opts = {}) {
    if (!(s.imag() > 0.0)) throw ArgumentError("volterra_jost_oracle: need Im s > 0");
    if (iters == 0) throw ArgumentError("volterra_jost_oracle: iters must be >= 1");
    if (!(x_max > opts.x_min)) throw ArgumentError("volterra_jost_oracle: need x_max > x_min");
    const auto n = static_cast<std::size_t>(std::ceil((x_max - opts.x_min) / opts.step));
    JostOracle o;
    o.s = s;
    o.x = linspace(opts.x_min, x_max, n + 1);
    const double dx = o.x[1] - o.x[0];
    std::vector<double> qv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) qv[i] = q(o.x[i]);
    std::vector<double> decay(n + 1);
    for (std::size_t i = 0; i <= n; ++i) decay[i] = std::abs(std::exp(kI * s * o.x[i]));

    const Complex e = std::exp(2.0 * kI * s * dx);
    o.g.assign(n + 1, 1.0);
    o.dg.assign(n + 1, 0.0);
    std::vector<Complex> next(n + 1), J(n + 1);
    for (std::size_t it = 1; it <= iters; ++it) {
        Complex j = 0.0, l = 0.0;
        J[n] = 0.0;
        next[n] = 1.0;
        for (std::size_t k = n; k-- > 0;) {
            const Complex p0 = qv[k] * o.g[k];
            const Complex p1 = qv[k + 1] * o.g[k + 1];
            j = e * j + 0.5 * dx * (p0 + e * p1);
            l = l + 0.5 * dx * (p0 + p1);
            J[k] = j;
            next[k] = 1.0 + (j - l) / (2.0 * kI * s);
        }
        double delta = 0.0;
        for (std::size_t k = 0; k <= n; ++k) delta = std::max(delta, std::abs(next[k] - o.g[k]) * decay[k]);
        o.g.swap(next);
        for (std::size_t k = 0; k <= n; ++k) o.dg[k] = -J[k];
        o.iterations = it;
        o.last_delta = delta;
        if (delta <= opts.tol) break;
        if (it == iters) {
            std::ostringstream os;
            os << "Volterra iteration did not converge in " << iters << " iterations (last delta " << delta << ")";
            throw ConvergenceError(os.str(), delta);
        }
    }
    double sup = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
        if (o.x[k] >= x_max - 1.0) sup = std::max(sup, std::abs(qv[k]));
    o.tail_bound = x_max * sup / std::abs(s);
    return o;
}

/// |(-f'' + q f - s^2 f) e^{-isx}| at node i, from 4th-order differences of g:
/// the normalized residual equals |-g'' - 2is g' + q g|.
inline double oracle_ode_residual(const JostOracle& o, const std::function<double(double)>& q, std::size_t i) {
    const double h = o.x[1] - o.x[0];
    const double lo = o.x.front(), hi = o.x.back();
    auto gv = [&](double t) {
        const auto k = static_cast<std::size_t>(std::llround((t - lo) / h));
        return o.g[k];
    };
    const double t = o.x[i];
    const Complex d1 = derivative(gv, t, h, lo, hi);
    const Complex d2 = second_derivative(gv, t, h, lo, hi);
    return std::abs(-d2 - 2.0 * kI * o.s * d1 + q(t) * o.g[i]);
}

}  // namespace vessel_lab
