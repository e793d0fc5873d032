#pragma once

// tau(x) = det(X(x0)^{-1} X(x)), its logarithmic derivative through the trace
// formula, beta and the generated Sturm-Liouville potential.

#include <string>
#include <vector>

#include "vessel_lab/vessel.hpp"

namespace vessel_lab {

/// Real tau value; the imaginary part (roundoff for Hermitian X) is dropped and
/// reported through `diagnostics` when it exceeds 1e-10 relative.
inline double tau(const Vessel& v, double x, std::vector<std::string>* diagnostics = nullptr) {
    v.check_domain(x);
    if (x == v.x0()) return 1.0;
    const Complex ld = log_det(v.X(x)) - log_det(v.X0());
    const Complex t = std::exp(ld);
    if (diagnostics && std::abs(t.imag()) > 1e-10 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "tau(" << x << ") has imaginary part " << t.imag() << " (discarded)";
        diagnostics->push_back(os.str());
    }
    return t.real();
}

/// log|tau(x)|.
inline double log_tau(const Vessel& v, double x) {
    v.check_domain(x);
    if (x == v.x0()) return 0.0;
    return (log_det(v.X(x)) - log_det(v.X0())).real();
}

/// tau'/tau = trace(sigma2 B^* X^{-1} B).
inline double tau_logderiv(const Vessel& v, double x) {
    return (v.sigma2(x) * v.moment(x)).trace().real();
}

/// tau''/tau from the trace formula and the exact derivative of the moment.
inline double tau_second_over_tau(const Vessel& v, double x) {
    const CMatrix s2 = v.sigma2(x);
    const double ld = (s2 * v.moment(x)).trace().real();
    double d = (s2 * v.moment_derivative(x)).trace().real();
    if (!v.params().constant) d += (v.params().sigma2_prime(x) * v.moment(x)).trace().real();
    return d + ld * ld;
}

inline double beta(const Vessel& v, double x) { return -tau_logderiv(v, x); }

/// beta' = -(tau'/tau)'.
inline double beta_prime(const Vessel& v, double x) {
    const double ld = tau_logderiv(v, x);
    return -(tau_second_over_tau(v, x) - ld * ld);
}

inline void require_sl(const Vessel& v, const char* what) {
    if (v.family() != Family::SL)
        throw FamilyError(std::string(what) + " is defined for the SL family only (got " + to_string(v.family()) + ")");
}

/// q = 2 beta' from the exact moment derivative.
inline double potential_at(const Vessel& v, double x) {
    require_sl(v, "potential");
    return 2.0 * beta_prime(v, x);
}

/// -2 (ln tau)'' by a 4th-order second difference of log tau.
inline double q_from_log_tau(const Vessel& v, double x) {
    return -2.0 * second_derivative([&](double t) { return log_tau(v, t); }, x, v.step(), v.x0(), v.x_max());
}

/// 2 beta' by a 4th-order difference of the trace-formula beta.
inline double q_from_beta_differences(const Vessel& v, double x) {
    return 2.0 * derivative([&](double t) { return beta(v, t); }, x, v.step(), v.x0(), v.x_max());
}

/// d/dx log tau by a 4th-order difference.
inline double logderiv_by_differences(const Vessel& v, double x) {
    return derivative([&](double t) { return log_tau(v, t); }, x, v.step(), v.x0(), v.x_max());
}

struct TauProfile {
    std::vector<double> grid;
    std::vector<double> tau;
    std::vector<double> logderiv;
    std::vector<double> beta;
    std::vector<double> q;
    /// Independent routes to q: 2 beta' by differences and -2 (ln tau)''.
    std::vector<double> q_beta_differences;
    std::vector<double> q_log_tau;
    double max_crosscheck = 0.0;
    std::vector<std::string> diagnostics;
};

inline TauProfile potential(const Vessel& v, const std::vector<double>& grid) {
    require_sl(v, "potential");
    TauProfile p;
    for (double x : grid) {
        v.check_domain(x);
        p.grid.push_back(x);
        p.tau.push_back(tau(v, x, &p.diagnostics));
        const double ld = tau_logderiv(v, x);
        p.logderiv.push_back(ld);
        p.beta.push_back(-ld);
        p.q.push_back(potential_at(v, x));
        p.q_beta_differences.push_back(q_from_beta_differences(v, x));
        p.q_log_tau.push_back(q_from_log_tau(v, x));
        p.max_crosscheck = std::max({p.max_crosscheck, std::abs(p.q.back() - p.q_beta_differences.back()),
                                     std::abs(p.q.back() - p.q_log_tau.back())});
    }
    return p;
}

/// ||gamma_*(x) - (gamma + [[i tau''/tau, tau'/tau], [-tau'/tau, 0]])||.
inline double check_gamma_star_formula(const Vessel& v, double x) {
    require_sl(v, "check_gamma_star_formula");
    const double t1 = tau_logderiv(v, x);
    const double t2 = tau_second_over_tau(v, x);
    CMatrix f(2, 2);
    f << kI * t2, t1, -t1, 0.0;
    return norm(v.gamma_star(x) - (v.gamma(x) + f));
}

struct LinearBound {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares slope, intercept lowered until the line sits below every sample.
inline LinearBound fit_linear_lower_bound(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ArgumentError("fit_linear_lower_bound: need >= 2 samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    LinearBound b;
    b.slope = sxy / sxx;
    b.intercept = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) b.intercept = std::min(b.intercept, ys[i] - b.slope * xs[i]);
    return b;
}

struct DissipativeBounds {
    /// trace(X(x) - X0) >= slope (x - x0) + intercept.
    LinearBound trace_growth;
    /// lambda_min(X(x)) >= slope (x - x0) + intercept, i.e. ||X^{-1}|| <= 1 / (...).
    LinearBound inverse_decay;
    /// max |q(x)| (x - x0) over the potential window (SL only, otherwise NaN).
    double q_times_x = std::numeric_limits<double>::quiet_NaN();
    /// max ||B(x)|| over [x0, end of the fit window].
    double max_B_norm = 0.0;
};

inline DissipativeBounds dissipative_bounds(const Vessel& v, Interval fit_window, Interval q_window,
                                            std::size_t samples = 181) {
    DissipativeBounds r;
    std::vector<double> xs, tr, lmin;
    for (double x : linspace(fit_window.a, fit_window.b, samples)) {
        const CMatrix X = v.X(x);
        xs.push_back(x - v.x0());
        tr.push_back((X - v.X0()).trace().real());
        lmin.push_back(min_hermitian_eigenvalue(X));
    }
    for (double x : linspace(v.x0(), fit_window.b, samples)) r.max_B_norm = std::max(r.max_B_norm, norm(v.B(x)));
    r.trace_growth = fit_linear_lower_bound(xs, tr);
    r.inverse_decay = fit_linear_lower_bound(xs, lmin);
    if (v.family() == Family::SL) {
        r.q_times_x = 0.0;
        const auto n = static_cast<std::size_t>(std::ceil((q_window.b - q_window.a) / v.step())) + 1;
        for (double x : linspace(q_window.a, q_window.b, std::min<std::size_t>(n, 20001)))
            r.q_times_x = std::max(r.q_times_x, std::abs(potential_at(v, x)) * (x - v.x0()));
    }
    return r;
}

}  // namespace vessel_lab
