#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature, with power-law
// substitutions for half-line integrals whose integrands have algebraic
// behaviour at the origin or in the tail.

#include <functional>

namespace tsparse::quad {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int subdivisions = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_subdivisions = 20000;
};

using Integrand = std::function<double(double)>;

/// One non-adaptive 15-point Gauss-Kronrod panel on [a, b].
QuadratureResult gauss_kronrod15(const Integrand& f, double a, double b);

/// Integral over a finite interval [a, b]. Throws numerical_error when the
/// tolerance cannot be met within max_subdivisions.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts = {});

/// Integral over [a, inf) with x = a + (u / (1 - u))^power, u in (0, 1).
/// An integrand behaving like (x-a)^e near a is smooth in u when
/// power = 2 / (e + 1); one decaying like x^{-1-c} needs power >= 1 / c.
QuadratureResult integrate_from(const Integrand& f, double a, double power = 1.0,
                                const QuadratureOptions& opts = {});

/// Integral over the whole real line, split at `center`.
QuadratureResult integrate_real_line(const Integrand& f, double power = 1.0, double center = 0.0,
                                     const QuadratureOptions& opts = {});

/// Substitution power that smooths an x^e singularity at the origin.
double origin_power(double exponent);

} // namespace tsparse::quad
