#pragma once

// Small reference vessels with known closed forms.

#include "vessel_lab/vessel.hpp"

namespace vessel_lab::fixtures {

inline CMatrix row(std::initializer_list<Complex> entries) {
    CMatrix r(1, static_cast<Eigen::Index>(entries.size()));
    Eigen::Index j = 0;
    for (auto e : entries) r(0, j++) = e;
    return r;
}

/// SL vessel with A = [i kappa^2], B0 = [1, 0], X0 = [1], x0 = 0. For kappa = 1,
/// B(x) = [cos x, -i sin x] and tau(x) = 1 + x/2 + sin(2x)/4.
inline Vessel rank1(double kappa = 1.0, double interval_end = 100.0, const ConstructionOptions& opts = {}) {
    CMatrix A(1, 1);
    A(0, 0) = kI * kappa * kappa;
    return standard_construction(sl_parameters({0.0, interval_end}), A, row({1.0, 0.0}), identity(1), 0.0, opts);
}

/// Vessel with B0 = 0; S = I and X = X0 everywhere.
inline Vessel zero(Family family = Family::SL, double interval_end = 10.0, const ConstructionOptions& opts = {}) {
    const auto params = family_parameters(family, {0.0, interval_end});
    CMatrix A(1, 1);
    A(0, 0) = kI;
    return standard_construction(params, A, CMatrix::Zero(1, params.dim_E), identity(1), 0.0, opts);
}

/// SL vessel with A = diag(i, 4i), B0 rows [1, 0], [1, 0] and a diagonal X0.
inline Vessel diag2(double x0_11 = 1.0, double x0_22 = 1.0, double interval_end = 50.0,
                    const ConstructionOptions& opts = {}) {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = kI;
    A(1, 1) = 4.0 * kI;
    CMatrix B0 = CMatrix::Zero(2, 2);
    B0(0, 0) = 1.0;
    B0(1, 0) = 1.0;
    CMatrix X0 = CMatrix::Zero(2, 2);
    X0(0, 0) = x0_11;
    X0(1, 1) = x0_22;
    return standard_construction(sl_parameters({0.0, interval_end}), A, B0, X0, 0.0, opts);
}

/// SL vessel with X0 = [-1]; X(x) = -1 + x/2 + sin(2x)/4 vanishes near x = 2.48.
inline Vessel indefinite(double interval_end = 5.0, const ConstructionOptions& opts = {}) {
    CMatrix A(1, 1);
    A(0, 0) = kI;
    return standard_construction(sl_parameters({0.0, interval_end}), A, row({1.0, 0.0}), -identity(1), 0.0, opts);
}

/// NLS vessel with spectrum in the left half plane and the Cauchy-type X0
/// solving the Lyapunov equation.
inline Vessel nls(double interval_end = 2.0, const ConstructionOptions& opts = {}) {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = Complex(-1.0, 1.0);
    A(1, 1) = Complex(-0.5, 2.0);
    CMatrix B0(2, 2);
    B0 << 1.0, Complex(0.5, 0.5), Complex(0.0, 1.0), -0.5;
    const auto params = nls_parameters({0.0, interval_end});
    const CMatrix X0 = solve_lyapunov(A, B0 * params.sigma1(0.0) * B0.adjoint());
    return standard_construction(params, A, B0, X0, 0.0, opts);
}

inline Vessel nls4(double interval_end = 1.0, const ConstructionOptions& opts = {}) {
    CMatrix A = CMatrix::Zero(3, 3);
    A(0, 0) = Complex(-1.0, 1.0);
    A(1, 1) = Complex(-0.5, 2.0);
    A(2, 2) = Complex(-0.8, -0.5);
    CMatrix B0(3, 4);
    B0 << 1.0, 0.5, Complex(0.0, 0.5), 0.25,
          Complex(0.0, 1.0), -0.5, 0.3, Complex(0.2, 0.1),
          0.4, Complex(0.0, -0.3), 1.0, -0.2;
    const auto params = nls4_parameters({0.0, interval_end});
    const CMatrix X0 = solve_lyapunov(A, B0 * params.sigma1(0.0) * B0.adjoint());
    return standard_construction(params, A, B0, X0, 0.0, opts);
}

/// Canonical-system vessel with imaginary spectrum {i, 3i}, B0 rows [1, 0], X0 = I.
inline Vessel canonical(double interval_end = 10.0, const ConstructionOptions& opts = {}) {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = kI;
    A(1, 1) = 3.0 * kI;
    CMatrix B0 = CMatrix::Zero(2, 2);
    B0(0, 0) = 1.0;
    B0(1, 0) = 1.0;
    return standard_construction(canonical_parameters({0.0, interval_end}), A, B0, identity(2), 0.0, opts);
}

}  // namespace vessel_lab::fixtures
