#pragma once

// Real-valued special functions used by the fog / pointing-error distributions.
//
// Conventions:
//   gamma_fn(x)                    = ∫_0^∞ t^{x-1} e^{-t} dt
//   upper_incomplete_gamma(a, x)   = ∫_x^∞ s^{a-1} e^{-s} ds
//   lower_incomplete_gamma(a, x)   = ∫_0^x s^{a-1} e^{-s} ds
//   exp_integral_en(a, r)          = ∫_1^∞ e^{-r t} t^{-a} dt
//
// All routines are pure and table-free.

namespace owc::specfun {

struct EvalOptions {
    double rel_tol = 1e-16;  ///< relative truncation tolerance, (0, 1e-3]
    int max_terms = 1000;    ///< cap on series terms / continued-fraction steps, >= 50

    void validate() const;
};

double gamma_fn(double x);
double log_gamma(double x);

/// Γ(a, x). For x < 0, a must be a positive integer and the finite series
/// (a-1)! e^{-x} Σ_{n<a} x^n/n! is used. For a <= 0, x must be positive.
double upper_incomplete_gamma(double a, double x, const EvalOptions& opts = {});

/// γ(a, x) for a > 0, x >= 0; for x < 0 a must be a positive integer.
double lower_incomplete_gamma(double a, double x, const EvalOptions& opts = {});

/// Q(a, x) = Γ(a, x) / Γ(a) for a > 0, x >= 0.
double regularized_upper_gamma(double a, double x, const EvalOptions& opts = {});

/// x^{-a} γ(a, x) = Σ_n (-x)^n / (n! (a + n)); entire in x, valid for any real x, a > 0.
double lower_gamma_scaled(double a, double x, const EvalOptions& opts = {});

/// Generalized exponential integral E_a(r) for real order a.
double exp_integral_en(double a, double r, const EvalOptions& opts = {});

double erf(double x);

/// True when a is a positive integer small enough for the finite series.
bool is_positive_integer(double a) noexcept;

}  // namespace owc::specfun
