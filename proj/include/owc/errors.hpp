#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace owc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Closed form divides by a parameter that is (numerically) zero.
class SingularParameter : public DomainError {
public:
    using DomainError::DomainError;
};

/// Closed form requested for an asymmetric relay placement.
class NotSymmetric : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Adaptive integration ran out of subdivisions above tolerance.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& label, double estimate, double err_estimate)
        : std::runtime_error(describe(label, estimate, err_estimate)),
          label_(label), estimate_(estimate), err_estimate_(err_estimate) {}

    const std::string& label() const noexcept { return label_; }
    double estimate() const noexcept { return estimate_; }
    double err_estimate() const noexcept { return err_estimate_; }

private:
    static std::string describe(const std::string& label, double estimate, double err) {
        std::ostringstream os;
        os << "integral '" << label << "' did not converge (estimate " << estimate << ", error "
           << err << ")";
        return os.str();
    }

    std::string label_;
    double estimate_;
    double err_estimate_;
};

/// Integrand returned NaN or an infinity.
class EvaluationFailure : public std::runtime_error {
public:
    EvaluationFailure(const std::string& label, double abscissa)
        : std::runtime_error(describe(label, abscissa)),
          label_(label), abscissa_(abscissa) {}

    const std::string& label() const noexcept { return label_; }
    double abscissa() const noexcept { return abscissa_; }

private:
    static std::string describe(const std::string& label, double x) {
        std::ostringstream os;
        os << "integral '" << label << "': integrand not finite at x = " << x;
        return os.str();
    }

    std::string label_;
    double abscissa_;
};

}  // namespace owc
