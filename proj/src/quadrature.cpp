#include "owc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "owc/errors.hpp"

namespace owc::quad {

namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; Gauss 7-point weights
// attach to the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kSigmoidPower = 4;

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// Maps the unit parameter s in (0, 1) onto the user's variable and returns f(x) * dx/ds.
class Transformed {
public:
    Transformed(const Integrand& f, const QuadSpec& spec) : f_(f), spec_(spec) {
        infinite_ = std::isinf(spec.upper);
        Singularity in_s = spec.endpoint_singularity;
        if (infinite_) {
            // t = lower corresponds to s = 1 and t = ∞ to s = 0.
            switch (spec.endpoint_singularity) {
                case Singularity::lower: in_s = Singularity::upper; break;
                case Singularity::upper: in_s = Singularity::lower; break;
                default: break;
            }
        }
        flatten_ = in_s;
    }

    double operator()(double s) const {
        double jac = 1.0;
        const double w = warp(s, jac);
        double x;
        if (infinite_) {
            if (w <= 0.0) return 0.0;
            x = spec_.lower + (1.0 - w) / w;
            jac /= w * w;
            if (!(x > spec_.lower)) x = std::nextafter(spec_.lower, kInfinity);
            if (std::isinf(x)) return 0.0;
        } else {
            x = spec_.lower + (spec_.upper - spec_.lower) * w;
            jac *= spec_.upper - spec_.lower;
            if (!(x > spec_.lower)) x = std::nextafter(spec_.lower, spec_.upper);
            if (!(x < spec_.upper)) x = std::nextafter(spec_.upper, spec_.lower);
        }
        if (jac == 0.0) return 0.0;
        const double fx = f_(x);
        if (!std::isfinite(fx)) throw EvaluationFailure(spec_.label, x);
        return fx * jac;
    }

private:
    // Change of variables on (0, 1) whose derivative vanishes at flagged endpoints.
    double warp(double s, double& jac) const {
        const int p = kSigmoidPower;
        switch (flatten_) {
            case Singularity::none: jac = 1.0; return s;
            case Singularity::lower:
                jac = p * std::pow(s, p - 1);
                return std::pow(s, p);
            case Singularity::upper: {
                const double r = 1.0 - s;
                jac = p * std::pow(r, p - 1);
                return 1.0 - std::pow(r, p);
            }
            case Singularity::both: {
                const double sp = std::pow(s, p);
                const double rp = std::pow(1.0 - s, p);
                const double den = sp + rp;
                jac = p * std::pow(s * (1.0 - s), p - 1) / (den * den);
                return sp / den;
            }
        }
        jac = 1.0;
        return s;
    }

    const Integrand& f_;
    const QuadSpec& spec_;
    bool infinite_ = false;
    Singularity flatten_ = Singularity::none;
};

Segment gauss_kronrod(const Transformed& g, double a, double b, int& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = g(center);
    double result_k = fc * kWgk[7];
    double result_g = fc * kWg[3];
    double result_abs = std::fabs(result_k);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = g(center - dx);
        f2[j] = g(center + dx);
        const double sum = f1[j] + f2[j];
        result_k += kWgk[j] * sum;
        result_abs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) result_g += kWg[j / 2] * sum;
    }
    evals += 15;
    const double mean = 0.5 * result_k;
    double result_asc = kWgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        result_asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    result_k *= half;
    result_g *= half;
    result_abs *= std::fabs(half);
    result_asc *= std::fabs(half);

    double err = std::fabs(result_k - result_g);
    if (result_asc != 0.0 && err != 0.0) {
        err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    }
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * result_abs, err);
    }
    return {a, b, result_k, err};
}

}  // namespace

void QuadSpec::validate() const {
    if (std::isnan(lower) || std::isnan(upper) || std::isinf(lower)) {
        throw std::invalid_argument("QuadSpec: lower must be finite and upper not NaN");
    }
    if (!(lower < upper)) throw std::invalid_argument("QuadSpec: requires lower < upper");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("QuadSpec: tolerances must be positive");
    }
    if (max_subdivisions < 10) throw std::invalid_argument("QuadSpec: max_subdivisions must be >= 10");
}

QuadResult integrate(const Integrand& f, const QuadSpec& spec) {
    spec.validate();
    const Transformed g(f, spec);

    QuadResult out;
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(g, 0.0, 1.0, out.evaluations);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    out.subdivisions = 1;

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };

    while (total_err > tolerance()) {
        if (out.subdivisions >= spec.max_subdivisions) {
            throw NonConvergence(spec.label, total, total_err);
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval can no longer be split in floating point.
            throw NonConvergence(spec.label, total, total_err);
        }
        const Segment left = gauss_kronrod(g, worst.a, mid, out.evaluations);
        const Segment right = gauss_kronrod(g, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++out.subdivisions;

        // Guard against drift from the running update by periodically re-summing.
        if (out.subdivisions % 64 == 0) {
            std::vector<Segment> all;
            all.reserve(heap.size());
            double v = 0.0;
            double e = 0.0;
            while (!heap.empty()) {
                all.push_back(heap.top());
                heap.pop();
            }
            for (const auto& s : all) {
                v += s.value;
                e += s.error;
                heap.push(s);
            }
            total = v;
            total_err = e;
        }
    }

    double v = 0.0;
    double e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    out.value = v;
    out.err_estimate = e;
    return out;
}

}  // namespace owc::quad
