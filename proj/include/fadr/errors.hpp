#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fadr {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Shape or layout mismatch between containers (grid vs field, history entries).
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double last_residual)
        : std::runtime_error(what), iterations_(iterations), last_residual_(last_residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    std::size_t iterations_;
    double last_residual_;
};

/// Root finder failure; carries the polynomial it was given.
class RootFindingError : public std::runtime_error {
public:
    RootFindingError(const std::string& what, std::vector<std::complex<double>> coefficients)
        : std::runtime_error(what), coefficients_(std::move(coefficients)) {}

    const std::vector<std::complex<double>>& coefficients() const noexcept { return coefficients_; }

private:
    std::vector<std::complex<double>> coefficients_;
};

/// Non-finite values appeared during time stepping.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace fadr
