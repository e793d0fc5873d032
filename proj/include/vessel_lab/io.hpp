#pragma once

// JSON / CSV encodings of vessels, curve specs, tau profiles and reports.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vessel_lab/curve.hpp"
#include "vessel_lab/sturm_liouville.hpp"
#include "vessel_lab/tau.hpp"

namespace vessel_lab::io {

using json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double; "-0" prints as "0".
inline std::string format_double(double v) {
    if (v == 0.0) return "0";
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Complex matrix as an array of rows, each row an array of [re, im] pairs.
inline json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back({m(i, j).real() + 0.0, m(i, j).imag() + 0.0});
        rows.push_back(std::move(r));
    }
    return rows;
}

inline CMatrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ArgumentError(what + ": expected an array of rows of [re, im] pairs");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
            throw ArgumentError(what + ": ragged matrix rows");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json& e = r[static_cast<std::size_t>(k)];
            if (e.is_number()) {
                m(i, k) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ArgumentError(what + ": entries must be [re, im] pairs");
            }
        }
    }
    return m;
}

inline json vessel_to_json(const Vessel& v) {
    const auto& p = v.params();
    json j;
    j["dim_H"] = v.dim_H();
    j["dim_E"] = v.dim_E();
    j["x0"] = v.x0();
    j["A"] = matrix_to_json(v.A());
    j["B0"] = matrix_to_json(v.B0());
    j["X0"] = matrix_to_json(v.X0());
    j["family"] = to_string(p.family);
    json args = json::object();
    if (p.family == Family::Custom) {
        if (!p.constant) throw ArgumentError("only constant custom parameters can be serialized");
        args["sigma1"] = matrix_to_json(p.sigma1(v.x0()));
        args["sigma2"] = matrix_to_json(p.sigma2(v.x0()));
        args["gamma"] = matrix_to_json(p.gamma(v.x0()));
    }
    j["family_args"] = std::move(args);
    j["interval"] = {p.interval.a, p.interval.b};
    j["steps_per_unit"] = v.options().steps_per_unit;
    return j;
}

inline Vessel vessel_from_json(const json& j) {
    for (const char* key : {"x0", "A", "B0", "X0", "family", "interval"})
        if (!j.contains(key)) throw ArgumentError(std::string("vessel JSON: missing field '") + key + "'");
    const Family family = family_from_string(j.at("family").get<std::string>());
    const json& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw ArgumentError("vessel JSON: interval must be [a, b]");
    const Interval interval{iv[0].get<double>(), iv[1].get<double>()};
    VesselParameters params;
    if (family == Family::Custom) {
        const json& a = j.value("family_args", json::object());
        for (const char* key : {"sigma1", "sigma2", "gamma"})
            if (!a.contains(key)) throw ArgumentError(std::string("custom family: family_args needs '") + key + "'");
        params = make_parameters(Family::Custom, matrix_from_json(a.at("sigma1"), "sigma1"),
                                 matrix_from_json(a.at("sigma2"), "sigma2"), matrix_from_json(a.at("gamma"), "gamma"),
                                 interval);
        validate(params);
    } else {
        params = family_parameters(family, interval);
    }
    ConstructionOptions opts;
    opts.steps_per_unit = j.value("steps_per_unit", kDefaultStepsPerUnit);
    const CMatrix A = matrix_from_json(j.at("A"), "A");
    const CMatrix B0 = matrix_from_json(j.at("B0"), "B0");
    const CMatrix X0 = matrix_from_json(j.at("X0"), "X0");
    if (j.contains("dim_H") && j.at("dim_H").get<Eigen::Index>() != A.rows())
        throw ArgumentError("vessel JSON: dim_H does not match A");
    if (j.contains("dim_E") && j.at("dim_E").get<Eigen::Index>() != params.dim_E)
        throw ArgumentError("vessel JSON: dim_E does not match the family");
    return standard_construction(params, A, B0, X0, j.at("x0").get<double>(), opts);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ArgumentError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << text;
}

inline Vessel load_vessel(const std::string& path) { return vessel_from_json(read_json_file(path)); }

inline json curve_to_json(const CurveSpec& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["t_min"] = c.t_min;
    j["t_max"] = c.t_max;
    if (c.kind == CurveKind::HorizontalLine) j["offset"] = c.offset;
    j["nodes"] = c.nodes;
    j["profile"] = c.profile;
    j["profile_args"] = {{"amplitude", c.amplitude}, {"width", c.width}};
    j["diagonal_density"] = c.diagonal_density;
    j["enforce_minimality"] = c.enforce_minimality;
    return j;
}

inline CurveSpec curve_from_json(const json& j) {
    CurveSpec c;
    c.kind = curve_kind_from_string(j.value("kind", std::string("segment-imag")));
    c.t_min = j.value("t_min", c.t_min);
    c.t_max = j.value("t_max", c.t_max);
    c.offset = j.value("offset", c.offset);
    c.nodes = j.value("nodes", c.nodes);
    c.profile = j.value("profile", c.profile);
    if (j.contains("profile_args")) {
        const json& a = j.at("profile_args");
        c.amplitude = a.value("amplitude", c.amplitude);
        c.width = a.value("width", c.width);
    }
    c.diagonal_density = j.value("diagonal_density", c.diagonal_density);
    c.enforce_minimality = j.value("enforce_minimality", c.profile != "zero");
    validate_curve(c);
    return c;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string tau_csv_header() { return "x,tau,logderiv,beta,q\n"; }

inline std::string tau_csv_row(double x, double tau, double logderiv, double beta, double q) {
    std::string s = format_double(x);
    for (double v : {tau, logderiv, beta, q}) {
        s += ',';
        s += format_double(v);
    }
    s += '\n';
    return s;
}

inline std::string jost_csv_header() { return "x,re_h,im_h,abs_h,theta_h,K_S\n"; }

inline std::string jost_csv(const std::vector<JostSweepRow>& rows) {
    std::string s = jost_csv_header();
    for (const auto& r : rows) {
        s += format_double(r.x);
        for (double v : {r.h.real(), r.h.imag(), std::abs(r.h), r.theta_h, r.K_S}) {
            s += ',';
            s += format_double(v);
        }
        s += '\n';
    }
    return s;
}

/// Deterministic JSON text (two-space indent, trailing newline).
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace vessel_lab::io
