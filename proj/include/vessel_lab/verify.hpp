#pragma once

// Verification suites run by the CLI. Every check records its residual and
// tolerance; a check passes iff residual <= tolerance.

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vessel_lab/concurrency.hpp"
#include "vessel_lab/io.hpp"

namespace vessel_lab {

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"axioms", "symmetry", "det",  "intertwine", "kernels",
                                                "tau",    "gl",       "jost", "bounds"};
    return names;
}

struct Check {
    std::string name;
    io::json location = io::json::object();
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string name;
    bool skipped = false;
    std::string reason;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyOptions {
    std::vector<std::string> suites = suite_names();
    /// Replaces the tolerance of every identity check (bounds keep their constants).
    std::optional<double> tol;
    std::uint64_t seed = 0;
    bool timings = false;
};

/// Uniform doubles in [a, b) from a 64-bit Mersenne twister; the mapping is
/// spelled out so draws are identical across standard libraries.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 rng_;
};

/// 5x5 lattice on [-2,2] x [1.5,3.5] i, minus points on spec(A) or its mirror.
inline std::vector<Complex> standard_lambda_grid(const Vessel& v) {
    std::vector<Complex> out;
    for (double im : linspace(1.5, 3.5, 5))
        for (double re : linspace(-2.0, 2.0, 5)) {
            const Complex l(re, im);
            if (spectrum_distance(v, l) > 1e-6 && spectrum_distance(v, -std::conj(l)) > 1e-6) out.push_back(l);
        }
    return out;
}

namespace detail {

inline io::json complex_json(Complex z) { return io::json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline Check make_check(std::string name, io::json loc, double residual, double tol) {
    Check c;
    c.name = std::move(name);
    c.location = std::move(loc);
    c.residual = residual;
    c.tolerance = tol;
    c.pass = std::isfinite(residual) && residual <= tol;
    return c;
}

/// Window used by the identity suites: [x0, min(x_max, x0 + 10)].
inline Interval check_window(const Vessel& v) { return {v.x0(), std::min(v.x_max(), v.x0() + 10.0)}; }

inline double snap(const Vessel& v, double x) {
    const double k = std::round((x - v.x0()) / v.step());
    return std::min(v.x_max(), v.x0() + k * v.step());
}

inline Complex draw_lambda(const Vessel& v, Draws& d) {
    for (;;) {
        const Complex l(d.uniform(-2.0, 2.0), d.uniform(0.5, 3.5));
        if (spectrum_distance(v, l) > 0.3) return l;
    }
}

inline CVector draw_vector(Eigen::Index n, Draws& d) {
    CVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = Complex(d.uniform(-1.0, 1.0), d.uniform(-1.0, 1.0));
    return u;
}

inline double m_A(const Vessel& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : v.spectrum()) m = std::max(m, z.imag());
    return m;
}

inline std::vector<Check> suite_axioms(const Vessel& v, double tol) {
    const Interval w = check_window(v);
    const auto xs = linspace(w.a, w.b, 11);
    auto rows = parallel_map<std::vector<Check>>(xs.size(), [&](std::size_t i) {
        const auto r = vessel_residuals(v, xs[i]);
        const io::json loc{{"x", xs[i]}};
        return std::vector<Check>{make_check("db", loc, r.db, tol), make_check("lyapunov", loc, r.lyapunov, tol),
                                  make_check("dx", loc, r.dx, tol), make_check("linkage", loc, r.linkage, tol)};
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline std::vector<Check> suite_symmetry(const Vessel& v, double tol) {
    const Interval w = check_window(v);
    const std::vector<double> xs{w.a, snap(v, 0.5 * (w.a + w.b)), w.b};
    const auto lambdas = standard_lambda_grid(v);
    return parallel_map<Check>(lambdas.size() * xs.size(), [&](std::size_t i) {
        const Complex l = lambdas[i / xs.size()];
        const double x = xs[i % xs.size()];
        return make_check("symmetry", {{"lambda", complex_json(l)}, {"x", x}}, check_symmetry(v, l, x), tol);
    });
}

inline std::vector<Check> suite_det(const Vessel& v, std::optional<double> tol) {
    const Interval w = check_window(v);
    const auto xs = linspace(w.a, w.b, 20);
    auto lambdas = standard_lambda_grid(v);
    for (double im : {0.5, 1.5, 2.5, 5.0}) {
        const Complex l(0.0, im);
        if (spectrum_distance(v, l) > 1e-6) lambdas.push_back(l);
    }
    auto rows = parallel_map<std::vector<Check>>(lambdas.size(), [&](std::size_t i) {
        const auto r = det_S(v, lambdas[i], xs);
        const io::json loc{{"lambda", complex_json(lambdas[i])}};
        std::vector<Check> c{make_check("det_stdev", loc, r.stdev, tol.value_or(1e-7))};
        if (r.unimodularity) c.push_back(make_check("det_unimodular", loc, *r.unimodularity, tol.value_or(1e-7)));
        return c;
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline std::vector<Check> suite_intertwine(const Vessel& v, std::optional<double> tol, std::uint64_t seed) {
    Draws d(seed);
    const Interval w = check_window(v);
    struct Draw {
        Complex lambda;
        CVector u0;
        double x;
    };
    std::vector<Draw> draws;
    for (int k = 0; k < 10; ++k) {
        Draw dr;
        dr.lambda = draw_lambda(v, d);
        dr.u0 = draw_vector(v.dim_E(), d);
        dr.x = snap(v, d.uniform(w.a, std::min(w.b, w.a + 3.0)));
        draws.push_back(dr);
    }
    const bool sl = v.family() == Family::SL;
    auto rows = parallel_map<std::vector<Check>>(draws.size(), [&](std::size_t i) {
        const auto& dr = draws[i];
        const io::json loc{{"lambda", complex_json(dr.lambda)}, {"x", dr.x}};
        std::vector<Check> c{make_check("output_lde", loc, check_intertwine(v, dr.lambda, dr.x, dr.u0),
                                        tol.value_or(1e-5))};
        c.push_back(make_check("ds", loc, check_ds(v, dr.lambda, dr.x), tol.value_or(1e-6)));
        c.push_back(make_check("fundamental", loc, check_sinttw(v, dr.lambda, dr.x), tol.value_or(1e-6)));
        if (sl) {
            c.push_back(make_check("schrodinger", loc, check_output_schrodinger(v, dr.lambda, dr.x, dr.u0),
                                   tol.value_or(1e-5)));
            c.push_back(make_check("output_lde_commuting_factor", loc,
                                   check_intertwine(v, dr.lambda, dr.x, dr.u0, sl_commuting_factor(dr.lambda)),
                                   tol.value_or(1e-5)));
        }
        return c;
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline std::vector<Check> suite_kernels(const Vessel& v, std::optional<double> tol, std::uint64_t seed) {
    Draws d(seed + 1);
    const Interval w = check_window(v);
    std::vector<Check> out;
    for (int set = 0; set < 3; ++set) {
        std::vector<Complex> ls;
        for (int k = 0; k < 4; ++k) ls.push_back(draw_lambda(v, d));
        const double x = snap(v, d.uniform(w.a, w.b));
        io::json loc{{"x", x}, {"lambdas", io::json::array()}};
        for (auto l : ls) loc["lambdas"].push_back(complex_json(l));
        out.push_back(make_check("gram_K1", loc, std::max(0.0, -gram_min_eigenvalue(v, KernelKind::K1, ls, x)),
                                 tol.value_or(1e-9)));
        out.push_back(make_check("gram_K2", loc, std::max(0.0, -gram_min_eigenvalue(v, KernelKind::K2, ls, x)),
                                 tol.value_or(1e-9)));
        const double q = norm(kernel_K1(v, ls[0], ls[1], x) - kernel_K1_quotient(v, ls[0], ls[1], x));
        out.push_back(make_check("K1_quotient", {{"lambda", complex_json(ls[0])}, {"mu", complex_json(ls[1])}, {"x", x}},
                                 q, tol.value_or(1e-8)));
    }
    return out;
}

inline std::vector<Check> suite_tau(const Vessel& v, std::optional<double> tol) {
    const Interval w = check_window(v);
    std::vector<double> xs;
    for (double x : linspace(w.a, w.b, 21)) xs.push_back(snap(v, x));
    const bool sl = v.family() == Family::SL;
    auto rows = parallel_map<std::vector<Check>>(xs.size(), [&](std::size_t i) {
        const double x = xs[i];
        const io::json loc{{"x", x}};
        std::vector<Check> c{make_check("trace_formula", loc,
                                        std::abs(tau_logderiv(v, x) - logderiv_by_differences(v, x)),
                                        tol.value_or(1e-6))};
        if (sl) {
            c.push_back(make_check("gamma_star_formula", loc, check_gamma_star_formula(v, x), tol.value_or(1e-6)));
            const double q = potential_at(v, x);
            c.push_back(make_check("q_vs_log_tau", loc, std::abs(q - q_from_log_tau(v, x)), tol.value_or(1e-5)));
            c.push_back(make_check("q_vs_beta_differences", loc, std::abs(q - q_from_beta_differences(v, x)),
                                   tol.value_or(1e-5)));
        }
        return c;
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    if (min_hermitian_eigenvalue(v.X0()) > 0.0) {
        const Vessel n = normalize_X0(v);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : xs) {
            const double r = tau(n, x) / tau(v, x);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        out.push_back(make_check("tau_realization_ratio", {{"x_min", w.a}, {"x_max", w.b}}, hi - lo,
                                 tol.value_or(1e-8)));
    }
    return out;
}

inline std::vector<Check> suite_gl(const Vessel& v, std::optional<double> tol) {
    const GLKernels k(v);
    const double len = std::min(5.0, v.x_max() - v.x0());
    const auto xs = linspace(v.x0() + 0.1 * len, v.x0() + len, 10);
    auto rows = parallel_map<std::vector<Check>>(xs.size(), [&](std::size_t i) {
        std::vector<Check> c;
        for (double y : linspace(v.x0(), xs[i], 10))
            c.push_back(make_check("gl_identity", {{"x", xs[i]}, {"y", y}}, gl_residual(k, xs[i], y, 64),
                                   tol.value_or(1e-7)));
        const double x = snap(v, xs[i]);
        c.push_back(make_check("q_from_K", {{"x", x}}, std::abs(q_from_K(k, x) - potential_at(v, x)),
                               tol.value_or(1e-5)));
        return c;
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

inline std::vector<Check> suite_jost(const Vessel& v, std::optional<double> tol, std::uint64_t seed) {
    Draws d(seed + 2);
    const Interval w = check_window(v);
    const double m = std::max(0.0, m_A(v));
    std::vector<std::pair<Complex, double>> draws;
    for (int k = 0; k < 8; ++k) {
        const Complex s(d.uniform(-1.0, 1.0), m + 0.5 + d.uniform(0.0, 1.0));
        draws.emplace_back(s, snap(v, d.uniform(w.a, w.b)));
    }
    auto rows = parallel_map<std::vector<Check>>(draws.size(), [&](std::size_t i) {
        const auto [s, x] = draws[i];
        const auto r = check_h_identities(v, s, x);
        const io::json loc{{"s", complex_json(s)}, {"x", x}};
        return std::vector<Check>{make_check("h_part1", loc, r.part1, tol.value_or(1e-5)),
                                  make_check("h_part2", loc, r.part2, tol.value_or(1e-5)),
                                  make_check("h_part3", loc, r.part3, tol.value_or(1e-5))};
    });
    std::vector<Check> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());

    // right factor Y(lambda) keeps theta_h' and rescales |h|^2 by an x-constant
    const Complex s = draws.front().first;
    const RightFactor y = [](Complex l) { return sl_commuting_factor(l); };
    double dtheta = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : linspace(w.a, w.b, 5)) {
        const double xs = snap(v, x);
        const auto [t0, h0] = jost_phase_rate(v, s, xs);
        const auto [t1, h1] = jost_phase_rate(v, s, xs, y);
        dtheta = std::max(dtheta, std::abs(t0 - t1));
        lo = std::min(lo, h1 / h0);
        hi = std::max(hi, h1 / h0);
    }
    out.push_back(make_check("commuting_factor_phase_rate", {{"s", complex_json(s)}}, dtheta, tol.value_or(1e-6)));
    out.push_back(make_check("commuting_factor_modulus_ratio", {{"s", complex_json(s)}}, (hi - lo) / std::abs(hi),
                             tol.value_or(1e-6)));
    return out;
}

/// Largest |d/dx K_S| over [x, x + pi].
inline double ks_derivative_envelope(const Vessel& v, Complex s, double x) {
    double best = 0.0;
    for (double t : linspace(x, x + std::numbers::pi, 64)) {
        const double ts = snap(v, t);
        const Stencil st = first_derivative_stencil(ts, v.step(), v.x0(), v.x_max());
        best = std::max(best, std::abs(apply_stencil(st, [&](double u) { return jost_K_S(v, s, u); })));
    }
    return best;
}

inline std::string bounds_skip_reason(const Vessel& v) {
    const auto c = classify(v);
    if (!c.minimal) return "vessel is not minimal";
    if (!c.dissipative) return "vessel is not dissipative";
    for (const auto& z : v.spectrum())
        if (std::abs(z.real()) > 1e-12 || z.imag() <= 0.0) return "spectrum is not on the positive imaginary axis";
    if (v.x_max() - v.x0() < 20.0) return "valid interval shorter than 20";
    return {};
}

inline std::vector<Check> suite_bounds(const Vessel& v) {
    std::vector<Check> out;
    const double end = std::min(v.x_max(), v.x0() + 50.0);
    const auto b = dissipative_bounds(v, {v.x0() + 5.0, end}, {v.x0() + 10.0, std::min(v.x_max(), v.x0() + 100.0)});
    const io::json win{{"x_min", v.x0() + 5.0}, {"x_max", end}};
    // residual -slope <= 0 means a non-negative fitted slope
    out.push_back(make_check("trace_growth_slope", win, -b.trace_growth.slope, 0.0));
    out.push_back(make_check("inverse_decay_slope", win, -b.inverse_decay.slope, 0.0));
    double early = 0.0, late = 0.0;
    const double mid = 0.5 * (v.x0() + end);
    for (double x : linspace(v.x0(), end, 201)) {
        const double nb = norm(v.B(x));
        if (x <= mid) early = std::max(early, nb);
        else late = std::max(late, nb);
    }
    out.push_back(make_check("B_norm_growth", win, late / early, 2.0));
    if (v.family() == Family::SL) {
        out.push_back(make_check("q_times_x", {{"x_min", v.x0() + 10.0}, {"x_max", std::min(v.x_max(), v.x0() + 100.0)}},
                                 b.q_times_x, 10.0));
        if (v.x_max() >= v.x0() + 80.0 + std::numbers::pi + 0.1) {
            const Complex s(0.3, std::max(0.0, m_A(v)) + 1.0);
            const double e20 = ks_derivative_envelope(v, s, v.x0() + 20.0);
            const double e40 = ks_derivative_envelope(v, s, v.x0() + 40.0);
            const double e80 = ks_derivative_envelope(v, s, v.x0() + 80.0);
            out.push_back(make_check("ks_derivative_decay", {{"s", complex_json(s)}, {"x", {20, 40}}}, e40 / e20, 1.0));
            out.push_back(make_check("ks_derivative_decay", {{"s", complex_json(s)}, {"x", {40, 80}}}, e80 / e40, 1.0));
        }
    }
    return out;
}

inline io::json check_json(const Check& c) {
    io::json j;
    j["name"] = c.name;
    j["location"] = c.location;
    j["residual"] = c.residual;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    return j;
}

}  // namespace detail

inline SuiteResult run_suite(const Vessel& v, const std::string& name, const VerifyOptions& opts) {
    SuiteResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    const bool sl = v.family() == Family::SL;
    auto skip = [&](std::string why) {
        r.skipped = true;
        r.reason = std::move(why);
    };
    if (name == "axioms") {
        r.checks = detail::suite_axioms(v, opts.tol.value_or(1e-6));
    } else if (name == "symmetry") {
        r.checks = detail::suite_symmetry(v, opts.tol.value_or(1e-6));
    } else if (name == "det") {
        r.checks = detail::suite_det(v, opts.tol);
    } else if (name == "intertwine") {
        r.checks = detail::suite_intertwine(v, opts.tol, opts.seed);
    } else if (name == "kernels") {
        if (classify(v).dissipative) r.checks = detail::suite_kernels(v, opts.tol, opts.seed);
        else skip("vessel is not dissipative");
    } else if (name == "tau") {
        r.checks = detail::suite_tau(v, opts.tol);
    } else if (name == "gl") {
        if (sl) r.checks = detail::suite_gl(v, opts.tol);
        else skip("Gelfand-Levitan kernels are defined for the SL family only");
    } else if (name == "jost") {
        if (sl) r.checks = detail::suite_jost(v, opts.tol, opts.seed);
        else skip("Jost diagnostics are defined for the SL family only");
    } else if (name == "bounds") {
        const auto why = detail::bounds_skip_reason(v);
        if (why.empty()) r.checks = detail::suite_bounds(v);
        else skip(why);
    } else {
        throw ArgumentError("unknown suite '" + name + "'");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct VerificationReport {
    std::vector<SuiteResult> suites;
    io::json json;
    bool all_pass = true;
};

inline VerificationReport verify(const Vessel& v, const VerifyOptions& opts) {
    for (const auto& s : opts.suites)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw ArgumentError("unknown suite '" + s + "'");
    VerificationReport rep;
    io::json j;
    j["vessel"] = {{"family", to_string(v.family())}, {"dim_H", v.dim_H()},   {"dim_E", v.dim_E()},
                   {"x0", v.x0()},                    {"x_max", v.x_max()}, {"truncated", v.truncated()},
                   {"warnings", v.warnings()}};
    j["seed"] = opts.seed;
    j["tolerance_override"] = opts.tol ? io::json(*opts.tol) : io::json(nullptr);
    j["suites"] = io::json::array();
    std::size_t total = 0, passed = 0, skipped = 0;
    for (const auto& name : opts.suites) {
        SuiteResult r = run_suite(v, name, opts);
        io::json s;
        s["name"] = r.name;
        s["status"] = r.skipped ? "skipped" : (r.passed() ? "passed" : "failed");
        if (r.skipped) s["reason"] = r.reason;
        std::size_t p = 0;
        s["checks"] = io::json::array();
        for (const auto& c : r.checks) {
            s["checks"].push_back(detail::check_json(c));
            p += c.pass ? 1 : 0;
        }
        s["passed"] = p;
        s["failed"] = r.checks.size() - p;
        if (opts.timings) s["seconds"] = r.seconds;
        total += r.checks.size();
        passed += p;
        skipped += r.skipped ? 1 : 0;
        if (!r.passed()) rep.all_pass = false;
        j["suites"].push_back(std::move(s));
        rep.suites.push_back(std::move(r));
    }
    j["summary"] = {{"checks", total}, {"passed", passed}, {"failed", total - passed}, {"skipped_suites", skipped},
                    {"all_pass", rep.all_pass}};
    rep.json = std::move(j);
    return rep;
}

}  // namespace vessel_lab
