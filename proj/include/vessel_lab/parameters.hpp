#pragma once

// Vessel parameters: the matrix functions sigma1, sigma2, gamma (and an
// optional prescribed gamma_star) on an interval, plus the standard families.

#include <optional>
#include <string>
#include <string_view>

#include "vessel_lab/errors.hpp"
#include "vessel_lab/numerics.hpp"

namespace vessel_lab {

enum class Family { SL, NLS, NLS4, Canonical, Custom };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::SL: return "sl";
        case Family::NLS: return "nls";
        case Family::NLS4: return "nls4";
        case Family::Canonical: return "canonical";
        case Family::Custom: return "custom";
    }
    return "custom";
}

inline Family family_from_string(std::string_view s) {
    if (s == "sl") return Family::SL;
    if (s == "nls") return Family::NLS;
    if (s == "nls4") return Family::NLS4;
    if (s == "canonical") return Family::Canonical;
    if (s == "custom") return Family::Custom;
    throw ArgumentError("unknown family '" + std::string(s) + "'");
}

struct Interval {
    double a = 0.0;
    double b = 1.0;

    bool contains(double x, double eps = 1e-12) const { return x >= a - eps && x <= b + eps; }
    double length() const { return b - a; }
};

struct VesselParameters {
    Family family = Family::Custom;
    Eigen::Index dim_E = 0;
    MatrixFunction sigma1;
    MatrixFunction sigma2;
    MatrixFunction gamma;
    /// Empty for vessels that produce gamma_star through the linkage formula.
    MatrixFunction gamma_star;
    Interval interval;
    /// True when sigma1, sigma2 and gamma do not depend on x.
    bool constant = true;

    /// d sigma1/dx; zero for constant parameters, otherwise a 5-point difference.
    CMatrix sigma1_prime(double x) const {
        if (constant) return CMatrix::Zero(dim_E, dim_E);
        const double h = 1e-3 * std::max(1.0, interval.length());
        return derivative(sigma1, x, h, -1e300, 1e300);
    }

    CMatrix sigma2_prime(double x) const {
        if (constant) return CMatrix::Zero(dim_E, dim_E);
        const double h = 1e-3 * std::max(1.0, interval.length());
        return derivative(sigma2, x, h, -1e300, 1e300);
    }
};

namespace detail {

inline MatrixFunction constant_function(CMatrix m) {
    return [m = std::move(m)](double) { return m; };
}

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace detail

/// Constant parameters from explicit matrices.
inline VesselParameters make_parameters(Family family, const CMatrix& s1, const CMatrix& s2, const CMatrix& g,
                                        Interval interval) {
    if (s1.rows() != s1.cols() || s2.rows() != s1.rows() || s2.cols() != s1.cols() || g.rows() != s1.rows() ||
        g.cols() != s1.cols())
        throw ArgumentError("vessel parameters: sigma1, sigma2, gamma must be square of one size");
    if (!(interval.a < interval.b)) throw ArgumentError("vessel parameters: interval needs a < b");
    VesselParameters p;
    p.family = family;
    p.dim_E = s1.rows();
    p.sigma1 = detail::constant_function(s1);
    p.sigma2 = detail::constant_function(s2);
    p.gamma = detail::constant_function(g);
    p.interval = interval;
    p.constant = true;
    return p;
}

inline VesselParameters sl_parameters(Interval interval) {
    using detail::mat2;
    return make_parameters(Family::SL, mat2(0, 1, 1, 0), mat2(1, 0, 0, 0), mat2(0, 0, 0, kI), interval);
}

inline VesselParameters nls_parameters(Interval interval) {
    using detail::mat2;
    return make_parameters(Family::NLS, identity(2), mat2(0.5, 0, 0, -0.5), CMatrix::Zero(2, 2), interval);
}

inline VesselParameters nls4_parameters(Interval interval) {
    CMatrix s2 = CMatrix::Zero(4, 4);
    s2.diagonal() << 0.5, 0.5, -0.5, -0.5;
    return make_parameters(Family::NLS4, identity(4), s2, CMatrix::Zero(4, 4), interval);
}

inline VesselParameters canonical_parameters(Interval interval) {
    using detail::mat2;
    return make_parameters(Family::Canonical, mat2(0, kI, -kI, 0), identity(2), CMatrix::Zero(2, 2), interval);
}

inline VesselParameters family_parameters(Family f, Interval interval) {
    switch (f) {
        case Family::SL: return sl_parameters(interval);
        case Family::NLS: return nls_parameters(interval);
        case Family::NLS4: return nls4_parameters(interval);
        case Family::Canonical: return canonical_parameters(interval);
        case Family::Custom: break;
    }
    throw ArgumentError("custom family needs explicit sigma1, sigma2, gamma");
}

/// SL output coupling written through beta = -tau'/tau.
inline CMatrix sl_gamma_star(Complex beta, Complex beta_prime) {
    return detail::mat2(-kI * (beta_prime - beta * beta), -beta, beta, kI);
}

inline CMatrix nls_gamma_star(Complex beta) { return detail::mat2(0, beta, -std::conj(beta), 0); }

inline CMatrix canonical_gamma_star(double p, double q) {
    return detail::mat2(-kI * p, -kI * q, -kI * q, kI * p);
}

struct ParameterCheck {
    double hermitian_sigma1 = 0.0;
    double hermitian_sigma2 = 0.0;
    double gamma_constraint = 0.0;
    double gamma_star_constraint = 0.0;
    bool ok = true;
};

/// Checks the parameter invariants at the given sample points and throws
/// ArgumentError on the first violation. Returns the worst residuals.
inline ParameterCheck validate(const VesselParameters& p, const std::vector<double>& samples) {
    ParameterCheck r;
    for (double x : samples) {
        const CMatrix s1 = p.sigma1(x);
        const CMatrix s2 = p.sigma2(x);
        const CMatrix g = p.gamma(x);
        if (s1.rows() != p.dim_E || s2.rows() != p.dim_E || g.rows() != p.dim_E)
            throw ArgumentError("vessel parameters: matrix size does not match dim_E");
        r.hermitian_sigma1 = std::max(r.hermitian_sigma1, (s1 - s1.adjoint()).cwiseAbs().maxCoeff());
        r.hermitian_sigma2 = std::max(r.hermitian_sigma2, (s2 - s2.adjoint()).cwiseAbs().maxCoeff());
        const CMatrix s1p = p.sigma1_prime(x);
        r.gamma_constraint = std::max(r.gamma_constraint, norm(g + g.adjoint() + s1p));
        if (p.gamma_star) {
            const CMatrix gs = p.gamma_star(x);
            r.gamma_star_constraint = std::max(r.gamma_star_constraint, norm(gs + gs.adjoint() + s1p));
        }
        Eigen::FullPivLU<CMatrix> lu(s1);
        if (!lu.isInvertible()) throw ArgumentError("vessel parameters: sigma1 is singular at x=" + std::to_string(x));
    }
    if (r.hermitian_sigma1 > 1e-10) throw ArgumentError("vessel parameters: sigma1 is not Hermitian");
    if (r.hermitian_sigma2 > 1e-10) throw ArgumentError("vessel parameters: sigma2 is not Hermitian");
    if (r.gamma_constraint > 1e-8) throw ArgumentError("vessel parameters: gamma + gamma^* != -sigma1'");
    if (r.gamma_star_constraint > 1e-8) throw ArgumentError("vessel parameters: gamma_* + gamma_*^* != -sigma1'");
    return r;
}

inline ParameterCheck validate(const VesselParameters& p) {
    return validate(p, linspace(p.interval.a, p.interval.b, 11));
}

}  // namespace vessel_lab
