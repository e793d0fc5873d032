#pragma once

// Finite-dimensional vessels from quadrature on a spectral curve symmetric
// under mu -> -conj(mu): A = diag(mu_k), B0 rows sqrt(w_k) b(mu_k) and the
// Cauchy-type X0 solving the Lyapunov equation.

#include <functional>
#include <string>
#include <vector>

#include "vessel_lab/transfer.hpp"

namespace vessel_lab {

enum class CurveKind {
    /// mu(t) = i t, t in [t_min, t_max], t_min > 0.
    SegmentImag,
    /// mu(t) = t + i offset, t in [t_min, t_max] with t_min = -t_max.
    HorizontalLine,
};

inline std::string to_string(CurveKind k) { return k == CurveKind::SegmentImag ? "segment-imag" : "horizontal-line"; }

inline CurveKind curve_kind_from_string(const std::string& s) {
    if (s == "segment-imag") return CurveKind::SegmentImag;
    if (s == "horizontal-line") return CurveKind::HorizontalLine;
    throw ArgumentError("unknown curve kind '" + s + "'");
}

using ProfileFunction = std::function<CMatrix(Complex)>;

struct CurveSpec {
    CurveKind kind = CurveKind::SegmentImag;
    double t_min = 1.0;
    double t_max = 2.0;
    double offset = 0.0;
    std::size_t nodes = 8;
    /// "gaussian": [a e^{-|mu|^2/w^2}, 0, ...]; "constant": [a, 0, ...]; "zero".
    std::string profile = "gaussian";
    double amplitude = 1.0;
    double width = 1.0;
    /// X0 entry used for a degenerate pairing mu_j + conj(mu_j) = 0.
    double diagonal_density = 1.0;
    /// Reject profiles vanishing at a node.
    bool enforce_minimality = true;
    /// Overrides `profile` when set.
    ProfileFunction custom_profile;

    Complex mu(double t) const {
        return kind == CurveKind::SegmentImag ? Complex(0.0, t) : Complex(t, offset);
    }
};

inline CMatrix profile_row(const CurveSpec& spec, Complex mu, Eigen::Index dim_E) {
    if (spec.custom_profile) {
        CMatrix r = spec.custom_profile(mu);
        if (r.rows() != 1 || r.cols() != dim_E) throw ArgumentError("curve profile must be a 1 x dim_E row");
        return r;
    }
    CMatrix r = CMatrix::Zero(1, dim_E);
    if (spec.profile == "gaussian") {
        r(0, 0) = spec.amplitude * std::exp(-std::norm(mu) / (spec.width * spec.width));
    } else if (spec.profile == "constant") {
        r(0, 0) = spec.amplitude;
    } else if (spec.profile != "zero") {
        throw ArgumentError("unknown curve profile '" + spec.profile + "'");
    }
    return r;
}

/// Distance from z to the curve.
inline double curve_distance(const CurveSpec& spec, Complex z) {
    if (spec.kind == CurveKind::SegmentImag) {
        const double t = std::clamp(z.imag(), spec.t_min, spec.t_max);
        return std::abs(z - Complex(0.0, t));
    }
    const double t = std::clamp(z.real(), spec.t_min, spec.t_max);
    return std::abs(z - Complex(t, spec.offset));
}

inline void validate_curve(const CurveSpec& spec) {
    if (spec.nodes == 0) throw ArgumentError("curve: nodes must be >= 1");
    if (!(spec.t_min < spec.t_max)) throw ArgumentError("curve: need t_min < t_max");
    if (spec.kind == CurveKind::SegmentImag && spec.t_min <= 0.0)
        throw ArgumentError("curve: segment-imag needs t_min > 0");
}

/// Largest distance from -conj(mu_k) to the curve over the quadrature nodes.
inline double curve_symmetry_defect(const CurveSpec& spec) {
    validate_curve(spec);
    const auto rule = gauss_legendre(spec.nodes, spec.t_min, spec.t_max);
    double worst = 0.0;
    for (double t : rule.nodes) worst = std::max(worst, curve_distance(spec, -std::conj(spec.mu(t))));
    return worst;
}

struct SchwartzCheck {
    /// Smallest C with ||mu^n b(mu)|| <= C^n for n = 1..n_max at the extreme nodes.
    double constant = 0.0;
    bool ok = true;
};

inline SchwartzCheck schwartz_weight_check(const CurveSpec& spec, Eigen::Index dim_E, int n_max = 8) {
    const auto rule = gauss_legendre(spec.nodes, spec.t_min, spec.t_max);
    SchwartzCheck c;
    for (double t : {rule.nodes.front(), rule.nodes.back()}) {
        const Complex mu = spec.mu(t);
        const double b = norm(profile_row(spec, mu, dim_E));
        for (int n = 1; n <= n_max; ++n) {
            const double val = std::pow(std::abs(mu), n) * b;
            if (!std::isfinite(val)) c.ok = false;
            c.constant = std::max(c.constant, std::pow(val, 1.0 / n));
        }
    }
    c.ok = c.ok && std::isfinite(c.constant);
    return c;
}

inline Vessel discretize_curve(const CurveSpec& spec, const VesselParameters& params, double x0,
                               const ConstructionOptions& opts = {}) {
    validate_curve(spec);
    const double defect = curve_symmetry_defect(spec);
    if (defect > 1e-8) {
        std::ostringstream os;
        os << "curve is not symmetric under mu -> -conj(mu) (defect " << defect << ")";
        throw DiscretizationError(os.str());
    }
    const auto rule = gauss_legendre(spec.nodes, spec.t_min, spec.t_max);
    const auto n = static_cast<Eigen::Index>(spec.nodes);
    const Eigen::Index e = params.dim_E;
    const CMatrix s1 = params.sigma1(x0);

    CMatrix A = CMatrix::Zero(n, n);
    CMatrix B0(n, e);
    std::vector<CMatrix> rows;
    std::vector<double> sw;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const Complex mu = spec.mu(rule.nodes[ku]);
        A(k, k) = mu;
        rows.push_back(profile_row(spec, mu, e));
        if (spec.enforce_minimality && norm(rows.back()) == 0.0) {
            std::ostringstream os;
            os << "profile vanishes at node " << k << " (mu=" << mu << "); the vessel would not be minimal";
            throw DiscretizationError(os.str());
        }
        sw.push_back(std::sqrt(rule.weights[ku]));
        B0.row(k) = sw.back() * rows.back();
    }

    CMatrix X0(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto ju = static_cast<std::size_t>(j), ku = static_cast<std::size_t>(k);
            const Complex den = A(j, j) + std::conj(A(k, k));
            const Complex num = -sw[ju] * sw[ku] * (rows[ju] * s1 * rows[ku].adjoint())(0, 0);
            const double scale = std::max(1.0, std::abs(A(j, j)) + std::abs(A(k, k)));
            if (std::abs(den) <= 1e-12 * scale) {
                if (std::abs(num) > 1e-14) {
                    std::ostringstream os;
                    os << "degenerate pairing of nodes " << j << " and " << k
                       << " (mu_j + conj(mu_k) = 0) with nonzero numerator " << std::abs(num);
                    throw DiscretizationError(os.str());
                }
                X0(j, k) = (j == k) ? Complex(spec.diagonal_density) : Complex(0.0);
            } else {
                X0(j, k) = num / den;
            }
        }
    X0 = hermitian_part(X0);
    const auto ev = hermitian_eigenvalues(X0);
    double smallest = std::numeric_limits<double>::infinity();
    for (double v : ev) smallest = std::min(smallest, std::abs(v));
    if (smallest <= opts.validity_tol) {
        std::ostringstream os;
        os << "discretized X0 is numerically singular (sigma_min " << smallest << ")";
        throw DiscretizationError(os.str());
    }
    return standard_construction(params, A, B0, X0, x0, opts);
}

struct SpectrumLocationReport {
    std::vector<Complex> lambdas;
    /// ||S(lambda + delta, x) - S(lambda - delta, x)|| for a real offset delta.
    std::vector<double> jump;
    std::vector<double> deviation;  // ||S(lambda, x) - I||
    std::size_t argmax = 0;
    bool minimal = false;
};

inline SpectrumLocationReport check_spectrum_location(const Vessel& v, const std::vector<Complex>& lambda_grid,
                                                      double x, double delta = 1e-3) {
    SpectrumLocationReport r;
    r.minimal = krylov_rank(v.A(), v.B0()) == static_cast<std::size_t>(v.dim_H());
    double best = -1.0;
    for (const auto& l : lambda_grid) {
        r.lambdas.push_back(l);
        const CMatrix sp = transfer_matrix(v, l + delta, x);
        const CMatrix sm = transfer_matrix(v, l - delta, x);
        r.jump.push_back(norm(sp - sm));
        r.deviation.push_back(norm(transfer_matrix(v, l, x) - identity(v.dim_E())));
        if (r.jump.back() > best) {
            best = r.jump.back();
            r.argmax = r.lambdas.size() - 1;
        }
    }
    return r;
}

/// ||S_{n_{i+1}}(lambda) - S_{n_i}(lambda)|| for each consecutive pair of node
/// counts, per probe: result[p][i].
inline std::vector<std::vector<double>> refinement_differences(CurveSpec spec, const VesselParameters& params,
                                                               double x0, const std::vector<std::size_t>& ladder,
                                                               const std::vector<Complex>& probes, double x,
                                                               const ConstructionOptions& opts = {}) {
    std::vector<std::vector<CMatrix>> values(probes.size());
    for (auto n : ladder) {
        spec.nodes = n;
        const Vessel v = discretize_curve(spec, params, x0, opts);
        for (std::size_t p = 0; p < probes.size(); ++p) values[p].push_back(transfer_matrix(v, probes[p], x));
    }
    std::vector<std::vector<double>> out(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p)
        for (std::size_t i = 1; i < values[p].size(); ++i) out[p].push_back(norm(values[p][i] - values[p][i - 1]));
    return out;
}

}  // namespace vessel_lab
