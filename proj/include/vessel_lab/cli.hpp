#pragma once

// Command-line front end: construct, sweep, verify, jost, gl.
// Exit codes: 0 success, 1 verification failure, 2 usage or precondition error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vessel_lab/fixtures.hpp"
#include "vessel_lab/verify.hpp"

namespace vessel_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("cannot parse '" + s + "' as a number in " + what);
    }
}

inline Interval parse_interval(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw ArgumentError("--interval expects a:b");
    return {parse_double(parts[0], "--interval"), parse_double(parts[1], "--interval")};
}

inline void emit_warning(std::ostream& err, const std::string& message) {
    err << io::json{{"warning", message}}.dump() << "\n";
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") out << text;
    else io::write_text_file(path, text);
}

struct ConstructArgs {
    std::string fixture;
    double kappa = 1.0;
    std::string interval;
    std::string curve;
    std::string curve_spec;
    std::size_t nodes = 8;
    std::string family = "sl";
    std::string profile = "gaussian";
    int steps_per_unit = kDefaultStepsPerUnit;
    std::string out;
};

inline Vessel build_vessel(const ConstructArgs& a) {
    ConstructionOptions opts;
    opts.steps_per_unit = a.steps_per_unit;
    const bool has_fixture = !a.fixture.empty();
    const bool has_curve = !a.curve.empty() || !a.curve_spec.empty();
    if (has_fixture == has_curve) throw ArgumentError("construct needs exactly one of --fixture or --curve/--curve-spec");
    if (has_fixture) {
        std::optional<Interval> iv;
        if (!a.interval.empty()) iv = parse_interval(a.interval);
        if (iv && iv->a != 0.0) throw ArgumentError("fixtures start at x0 = 0; --interval must be 0:b");
        auto end = [&](double d) { return iv ? iv->b : d; };
        if (a.fixture == "rank1") return fixtures::rank1(a.kappa, end(100.0), opts);
        if (a.fixture == "zero") return fixtures::zero(family_from_string(a.family), end(10.0), opts);
        if (a.fixture == "diag2") return fixtures::diag2(1.0, 1.0, end(50.0), opts);
        if (a.fixture == "indefinite") return fixtures::indefinite(end(5.0), opts);
        if (a.fixture == "nls") return fixtures::nls(end(2.0), opts);
        if (a.fixture == "nls4") return fixtures::nls4(end(1.0), opts);
        if (a.fixture == "canonical") return fixtures::canonical(end(10.0), opts);
        throw ArgumentError("unknown fixture '" + a.fixture + "'");
    }
    CurveSpec spec;
    if (!a.curve_spec.empty()) {
        spec = io::curve_from_json(io::read_json_file(a.curve_spec));
    } else {
        const auto parts = split(a.curve, ':');
        if (parts.empty()) throw ArgumentError("--curve expects kind:t_min:t_max[:offset]");
        spec.kind = curve_kind_from_string(parts[0]);
        if (parts.size() != 3 && parts.size() != 4) throw ArgumentError("--curve expects kind:t_min:t_max[:offset]");
        spec.t_min = parse_double(parts[1], "--curve");
        spec.t_max = parse_double(parts[2], "--curve");
        if (parts.size() == 4) spec.offset = parse_double(parts[3], "--curve");
        spec.nodes = a.nodes;
        spec.profile = a.profile;
        spec.enforce_minimality = a.profile != "zero";
    }
    const Interval iv = a.interval.empty() ? Interval{0.0, 50.0} : parse_interval(a.interval);
    return discretize_curve(spec, family_parameters(family_from_string(a.family), iv), iv.a, opts);
}

inline int cmd_construct(const ConstructArgs& a, std::ostream& out, std::ostream& err) {
    const Vessel v = build_vessel(a);
    for (const auto& w : v.warnings()) emit_warning(err, w);
    write_output(a.out, io::dump(io::vessel_to_json(v)), out);
    return kExitOk;
}

struct GridArgs {
    std::string input;
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::size_t steps = 101;
    std::string out;
};

/// Requested rows clipped to the valid interval; clipping is reported.
inline std::vector<double> sweep_grid(const Vessel& v, const GridArgs& a, std::ostream& err) {
    if (a.steps == 0) throw ArgumentError("--steps must be >= 1");
    const double lo = a.x_min.value_or(v.x0());
    const double hi = a.x_max.value_or(v.x_max());
    if (hi < lo) throw ArgumentError("--x-max must not be below --x-min");
    if (lo < v.x0()) throw DomainError("--x-min lies before x0");
    std::vector<double> xs;
    bool clipped = false;
    for (double x : linspace(lo, hi, a.steps)) {
        if (x > v.x_max() + 1e-12) {
            clipped = true;
            continue;
        }
        xs.push_back(x);
    }
    if (clipped) {
        std::ostringstream os;
        os << "rows beyond x=" << v.x_max() << " omitted (interval of validity ends there)";
        emit_warning(err, os.str());
    }
    for (const auto& w : v.warnings()) emit_warning(err, w);
    return xs;
}

inline int cmd_sweep(const GridArgs& a, std::ostream& out, std::ostream& err) {
    const Vessel v = io::load_vessel(a.input);
    const auto xs = sweep_grid(v, a, err);
    const bool sl = v.family() == Family::SL;
    if (!sl) emit_warning(err, "q is defined for the SL family only; the q column is nan");
    std::string text = io::tau_csv_header();
    const auto rows = parallel_map<std::string>(xs.size(), [&](std::size_t i) {
        const double x = xs[i];
        const double ld = tau_logderiv(v, x);
        const double q = sl ? potential_at(v, x) : std::numeric_limits<double>::quiet_NaN();
        return io::tau_csv_row(x, tau(v, x), ld, -ld, q);
    });
    for (const auto& r : rows) text += r;
    write_output(a.out, text, out);
    return kExitOk;
}

struct VerifyArgs {
    std::string input;
    std::string suites;
    std::optional<double> tol;
    std::uint64_t seed = 0;
    std::string report;
    bool timings = false;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    VerifyOptions opts;
    if (!a.suites.empty() && a.suites != "all") opts.suites = split(a.suites, ',');
    opts.tol = a.tol;
    opts.seed = a.seed;
    opts.timings = a.timings;
    for (const auto& s : opts.suites)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw ArgumentError("unknown suite '" + s + "'");
    const Vessel v = io::load_vessel(a.input);
    for (const auto& w : v.warnings()) emit_warning(err, w);
    const auto rep = verify(v, opts);
    write_output(a.report, io::dump(rep.json), out);
    return rep.all_pass ? kExitOk : kExitFailed;
}

struct JostArgs {
    GridArgs grid;
    double s_re = 0.3;
    double s_im = 2.0;
};

inline int cmd_jost(const JostArgs& a, std::ostream& out, std::ostream& err) {
    const Vessel v = io::load_vessel(a.grid.input);
    const auto xs = sweep_grid(v, a.grid, err);
    const auto rows = jost_sweep(v, Complex(a.s_re, a.s_im), xs);
    write_output(a.grid.out, io::jost_csv(rows), out);
    return kExitOk;
}

struct GLArgs {
    std::string input;
    std::size_t quad_n = 64;
    std::size_t samples = 10;
    std::optional<double> x_max;
    std::string out;
};

inline int cmd_gl(const GLArgs& a, std::ostream& out, std::ostream& err) {
    const Vessel v = io::load_vessel(a.input);
    for (const auto& w : v.warnings()) emit_warning(err, w);
    if (a.samples < 2) throw ArgumentError("--samples must be >= 2");
    const double hi = std::min(v.x_max(), a.x_max.value_or(std::min(v.x_max(), v.x0() + 5.0)));
    const GLKernels k(v);
    const auto xs = linspace(v.x0() + (hi - v.x0()) / static_cast<double>(a.samples), hi, a.samples);
    io::json j;
    j["quad_n"] = a.quad_n;
    j["samples"] = io::json::array();
    double worst = 0.0;
    for (double x : xs)
        for (double y : linspace(v.x0(), x, a.samples)) {
            const double r = gl_residual(k, x, y, a.quad_n);
            worst = std::max(worst, r);
            j["samples"].push_back({{"x", x}, {"y", y}, {"residual", r}});
        }
    j["max_residual"] = worst;
    j["q_from_K"] = io::json::array();
    for (double x : xs) {
        const double qk = q_from_K(k, x);
        const double q = potential_at(v, x);
        j["q_from_K"].push_back({{"x", x}, {"q_from_K", qk}, {"q", q}, {"difference", std::abs(qk - q)}});
    }
    write_output(a.out, io::dump(j), out);
    return kExitOk;
}

inline void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                       const io::json& extra = io::json::object()) {
    io::json j{{"error", kind}, {"message", message}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    err << j.dump() << "\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Operator vessel laboratory"};
    app.require_subcommand(1);

    detail::ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "build a vessel and write it as JSON");
    construct->add_option("--fixture", ca.fixture, "rank1 | zero | diag2 | indefinite | nls | nls4 | canonical");
    construct->add_option("--kappa", ca.kappa, "rank1: A = [i kappa^2]");
    construct->add_option("--interval", ca.interval, "a:b");
    construct->add_option("--curve", ca.curve, "segment-imag:t_min:t_max or horizontal-line:t_min:t_max:offset");
    construct->add_option("--curve-spec", ca.curve_spec, "curve spec JSON file");
    construct->add_option("--nodes", ca.nodes, "quadrature nodes on the curve");
    construct->add_option("--family", ca.family, "sl | nls | nls4 | canonical");
    construct->add_option("--profile", ca.profile, "gaussian | constant | zero");
    construct->add_option("--steps-per-unit", ca.steps_per_unit, "cache density");
    construct->add_option("--out", ca.out, "output file (stdout when omitted)");

    detail::GridArgs sa;
    auto* sweep = app.add_subcommand("sweep", "emit x,tau,logderiv,beta,q rows");
    sweep->add_option("--input", sa.input, "vessel JSON")->required();
    sweep->add_option("--x-min", sa.x_min);
    sweep->add_option("--x-max", sa.x_max);
    sweep->add_option("--steps", sa.steps, "number of rows");
    sweep->add_option("--out", sa.out);

    detail::VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
    verify_cmd->add_option("--input", va.input, "vessel JSON")->required();
    verify_cmd->add_option("--suite", va.suites, "comma separated suites or 'all'");
    verify_cmd->add_option("--tol", va.tol, "tolerance for every identity check");
    verify_cmd->add_option("--seed", va.seed);
    verify_cmd->add_option("--report", va.report, "report file (stdout when omitted)");
    verify_cmd->add_flag("--timings", va.timings, "include wall-clock seconds per suite");

    detail::JostArgs ja;
    auto* jost = app.add_subcommand("jost", "emit x,re_h,im_h,abs_h,theta_h,K_S rows");
    jost->add_option("--input", ja.grid.input, "vessel JSON")->required();
    jost->add_option("--s-re", ja.s_re);
    jost->add_option("--s-im", ja.s_im);
    jost->add_option("--x-min", ja.grid.x_min);
    jost->add_option("--x-max", ja.grid.x_max);
    jost->add_option("--steps", ja.grid.steps, "number of rows");
    jost->add_option("--out", ja.grid.out);

    detail::GLArgs ga;
    auto* gl = app.add_subcommand("gl", "Gelfand-Levitan residual report");
    gl->add_option("--input", ga.input, "vessel JSON")->required();
    gl->add_option("--quad-n", ga.quad_n);
    gl->add_option("--samples", ga.samples);
    gl->add_option("--x-max", ga.x_max);
    gl->add_option("--out", ga.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        detail::emit_error(err, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (construct->parsed()) return detail::cmd_construct(ca, out, err);
        if (sweep->parsed()) return detail::cmd_sweep(sa, out, err);
        if (verify_cmd->parsed()) return detail::cmd_verify(va, out, err);
        if (jost->parsed()) return detail::cmd_jost(ja, out, err);
        if (gl->parsed()) return detail::cmd_gl(ga, out, err);
    } catch (const PreconditionError& e) {
        detail::emit_error(err, e.kind(), e.what(), {{"residual", e.residual}});
        return kExitUsage;
    } catch (const Error& e) {
        detail::emit_error(err, e.kind(), e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        detail::emit_error(err, "internal", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace vessel_lab::cli
