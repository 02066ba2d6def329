#pragma once

#include <functional>
#include <limits>
#include <string>

namespace owc::quad {

/// Endpoints at which the integrand may be unbounded (but integrable).
enum class Singularity { none, lower, upper, both };

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct QuadSpec {
    double lower = 0.0;
    double upper = 1.0;  ///< may be kInfinity
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    Singularity endpoint_singularity = Singularity::none;
    std::string label = "integral";

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double err_estimate = 0.0;
    int subdivisions = 0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration. Nodes are interior only, so endpoints are never
/// evaluated. A semi-infinite range [a, ∞) is mapped to (0, 1] with t = a + (1 - s)/s; flagged
/// singular endpoints get a polynomial / sigmoidal change of variables that flattens algebraic
/// endpoint behaviour.
///
/// Throws owc::NonConvergence when max_subdivisions is exhausted above tolerance and
/// owc::EvaluationFailure when the integrand returns a non-finite value.
QuadResult integrate(const Integrand& f, const QuadSpec& spec);

}  // namespace owc::quad
