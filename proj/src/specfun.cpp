#include "owc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "owc/errors.hpp"

namespace owc::specfun {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kFiniteSeriesMaxOrder = 30;

double effective_tol(const EvalOptions& opts) { return std::max(opts.rel_tol, 2.0 * kEps); }

[[noreturn]] void not_converged(const char* what, double a, double x) {
    throw std::runtime_error(std::string(what) + " did not converge for a=" + std::to_string(a) +
                             ", x=" + std::to_string(x));
}

double lgamma_positive(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Σ_{n>=0} x^n / (a (a+1) ... (a+n)) = e^x x^{-a} γ(a, x).
double series_scaled(double a, double x, const EvalOptions& opts) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    const double tol = effective_tol(opts);
    for (int n = 1; n <= opts.max_terms; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * tol) return sum;
    }
    not_converged("incomplete gamma series", a, x);
}

// Legendre continued fraction (modified Lentz) for e^x x^{-a} Γ(a, x); converges for x > 0, any a.
double continued_fraction_scaled(double a, double x, const EvalOptions& opts) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    const double tol = effective_tol(opts);
    for (int i = 1; i <= opts.max_terms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < tol) return h;
    }
    not_converged("incomplete gamma continued fraction", a, x);
}

// (a-1)! Σ_{n<a} x^n / n!  (the polynomial part of Γ(a, x) for integer a).
double finite_series_poly(int a, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < a; ++n) {
        term *= x / n;
        sum += term;
    }
    double fact = 1.0;
    for (int n = 2; n < a; ++n) fact *= n;
    return fact * sum;
}

// Γ(a, x) for a in [0, 1) and 0 < x <= 1.5, written so that the Γ(a) pole cancels analytically:
// Γ(a,x) = (Γ(1+a) - x^a)/a - x^a Σ_{n>=1} (-x)^n / (n! (a+n)).
double upper_gamma_small_a(double a, double x, const EvalOptions& opts) {
    const double lx = std::log(x);
    double head;
    if (a == 0.0) {
        head = -std::numbers::egamma_v<double> - lx;
    } else {
        head = (std::expm1(lgamma_positive(1.0 + a)) - std::expm1(a * lx)) / a;
    }
    double term = 1.0;  // (-x)^n / n!
    double sum = 0.0;
    const double tol = effective_tol(opts);
    for (int n = 1; n <= opts.max_terms; ++n) {
        term *= -x / n;
        const double add = term / (a + n);
        sum += add;
        if (std::fabs(add) < tol * std::max(std::fabs(sum), kTiny)) {
            const double xa = (a == 0.0) ? 1.0 : std::exp(a * lx);
            return head - xa * sum;
        }
    }
    not_converged("small-order incomplete gamma", a, x);
}

// e^x x^{-a} Γ(a, x) for a > 0, x > 0.
double upper_scaled_positive_order(double a, double x, const EvalOptions& opts) {
    if (is_positive_integer(a) && a <= kFiniteSeriesMaxOrder) {
        return finite_series_poly(static_cast<int>(a), x) * std::pow(x, -a);
    }
    if (x >= a + 1.0) return continued_fraction_scaled(a, x, opts);
    if (a < 1.0 && x < 1.0) return upper_gamma_small_a(a, x, opts) * std::exp(x - a * std::log(x));
    return std::exp(lgamma_positive(a) + x - a * std::log(x)) - series_scaled(a, x, opts);
}

// E_p(x) for p >= 1, 0 < x < 1 by upward recurrence E_{q+1} = (e^{-x} - x E_q)/q from a base
// order in (0, 1].
double en_upward(double p, double x, const EvalOptions& opts) {
    const double whole = std::floor(p);
    const double frac = p - whole;
    double q = frac > 0.0 ? frac : 1.0;
    // E_q(x) = x^{q-1} Γ(1-q, x), 1-q in [0, 1)
    double en = std::pow(x, q - 1.0) * upper_gamma_small_a(1.0 - q, x, opts);
    const double ex = std::exp(-x);
    const int steps = static_cast<int>(std::lround(p - q));
    for (int i = 0; i < steps; ++i) {
        en = (ex - x * en) / q;
        q += 1.0;
    }
    return en;
}

}  // namespace

void EvalOptions::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
        throw std::invalid_argument("EvalOptions.rel_tol must lie in (0, 1e-3]");
    }
    if (max_terms < 50) throw std::invalid_argument("EvalOptions.max_terms must be >= 50");
}

bool is_positive_integer(double a) noexcept {
    return a >= 1.0 && a <= 170.0 && a == std::floor(a);
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    return lgamma_positive(x);
}

double upper_incomplete_gamma(double a, double x, const EvalOptions& opts) {
    opts.validate();
    if (std::isnan(a) || std::isnan(x)) throw DomainError("upper_incomplete_gamma: NaN argument");
    if (x < 0.0) {
        if (!is_positive_integer(a)) {
            throw DomainError("upper_incomplete_gamma: negative x requires a positive integer shape");
        }
        return std::exp(-x) * finite_series_poly(static_cast<int>(a), x);
    }
    if (x == 0.0) {
        if (a > 0.0) return gamma_fn(a);
        throw DomainError("upper_incomplete_gamma: Γ(a, 0) diverges for a <= 0");
    }
    if (std::isinf(x)) return 0.0;
    if (a > 0.0) {
        if (is_positive_integer(a) && a <= kFiniteSeriesMaxOrder) {
            return std::exp(-x) * finite_series_poly(static_cast<int>(a), x);
        }
        if (x >= a + 1.0) {
            return std::exp(a * std::log(x) - x) * continued_fraction_scaled(a, x, opts);
        }
        if (a < 1.0 && x < 1.0) return upper_gamma_small_a(a, x, opts);
        return std::tgamma(a) - std::exp(a * std::log(x) - x) * series_scaled(a, x, opts);
    }
    // a <= 0: Γ(a, x) = x^a E_{1-a}(x)
    return std::exp(a * std::log(x)) * exp_integral_en(1.0 - a, x, opts);
}

double lower_incomplete_gamma(double a, double x, const EvalOptions& opts) {
    opts.validate();
    if (!(a > 0.0)) throw DomainError("lower_incomplete_gamma: shape must be positive");
    if (std::isnan(x)) throw DomainError("lower_incomplete_gamma: NaN argument");
    if (x < 0.0) {
        if (!is_positive_integer(a)) {
            throw DomainError("lower_incomplete_gamma: negative x requires a positive integer shape");
        }
        if (x > -1.0) return std::pow(x, a) * lower_gamma_scaled(a, x, opts);
        return std::tgamma(a) - upper_incomplete_gamma(a, x, opts);
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::exp(a * std::log(x) - x) * series_scaled(a, x, opts);
    return std::tgamma(a) - upper_incomplete_gamma(a, x, opts);
}

double regularized_upper_gamma(double a, double x, const EvalOptions& opts) {
    opts.validate();
    if (!(a > 0.0)) throw DomainError("regularized_upper_gamma: shape must be positive");
    if (!(x >= 0.0)) throw DomainError("regularized_upper_gamma: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double log_pref = a * std::log(x) - x - lgamma_positive(a);
    if (x < a + 1.0) return 1.0 - std::exp(log_pref) * series_scaled(a, x, opts);
    return std::exp(log_pref) * continued_fraction_scaled(a, x, opts);
}

double lower_gamma_scaled(double a, double x, const EvalOptions& opts) {
    opts.validate();
    if (!(a > 0.0)) throw DomainError("lower_gamma_scaled: shape must be positive");
    if (std::isnan(x)) throw DomainError("lower_gamma_scaled: NaN argument");
    if (x > 0.0) {
        if (x < a + 1.0) return std::exp(-x) * series_scaled(a, x, opts);
        return (std::tgamma(a) - upper_incomplete_gamma(a, x, opts)) * std::pow(x, -a);
    }
    // x <= 0: every term of Σ (-x)^n / (n! (a+n)) is non-negative.
    const double y = -x;
    const int cap = std::max(opts.max_terms, static_cast<int>(3.0 * y) + 100);
    const double tol = effective_tol(opts);
    double term = 1.0;
    double sum = 1.0 / a;
    for (int n = 1; n <= cap; ++n) {
        term *= y / n;
        const double add = term / (a + n);
        sum += add;
        if (add < tol * sum && n > y) return sum;
    }
    not_converged("scaled lower incomplete gamma", a, x);
}

double exp_integral_en(double a, double r, const EvalOptions& opts) {
    opts.validate();
    if (std::isnan(a) || std::isnan(r)) throw DomainError("exp_integral_en: NaN argument");
    if (r < 0.0) throw DomainError("exp_integral_en: divergent for r < 0");
    if (r == 0.0) {
        if (a > 1.0) return 1.0 / (a - 1.0);
        throw DomainError("exp_integral_en: divergent for r = 0 and a <= 1");
    }
    if (std::isinf(r)) return 0.0;
    const double order = 1.0 - a;  // E_a(r) = r^{a-1} Γ(1-a, r)
    if (order > 0.0) return std::exp(-r) * upper_scaled_positive_order(order, r, opts);
    if (r >= 1.0) return std::exp(-r) * continued_fraction_scaled(order, r, opts);
    return en_upward(a, r, opts);
}

double erf(double x) { return std::erf(x); }

}  // namespace owc::specfun
