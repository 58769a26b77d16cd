#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latkpp {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A root find or iteration failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// NaN or Inf appeared during time integration.
class BlowupError : public Error {
public:
    BlowupError(std::size_t step, long index)
        : Error("non-finite value at step " + std::to_string(step) + ", index " +
                std::to_string(index)),
          step_(step), index_(index) {}
    std::size_t step() const noexcept { return step_; }
    long index() const noexcept { return index_; }

private:
    std::size_t step_;
    long index_;
};

/// Mass reached the edge of a truncated window.
class ContaminationError : public Error {
public:
    ContaminationError(double t, double magnitude)
        : Error("boundary magnitude " + std::to_string(magnitude) + " at t=" + std::to_string(t)),
          t_(t), magnitude_(magnitude) {}
    double t() const noexcept { return t_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    double t_;
    double magnitude_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A requested level or feature is absent from the data.
class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace latkpp
