#pragma once

#include <stdexcept>
#include <string>

namespace cevlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model parameters outside their domain (e.g. a not in (1/2, 1)).
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// The inner expression of the semi-discrete step came out negative beyond
/// rounding tolerance. Assumption A does not hold for the step in use.
class NegativeInner : public Error {
public:
    NegativeInner(double y, double dt, double value)
        : Error("negative inner value " + std::to_string(value) + " at y=" + std::to_string(y) +
                ", dt=" + std::to_string(dt)),
          y(y), dt(dt), value(value) {}

    double y;
    double dt;
    double value;
};

/// A step size or parameter set outside the Assumption A region.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

class NonDivisibleFactor : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class InfeasibleLevel : public Error {
public:
    InfeasibleLevel(int exponent, double dt, double max_step, const std::string& what)
        : Error(what), exponent(exponent), dt(dt), max_step(max_step) {}

    int exponent;
    double dt;
    double max_step;
};

class InsufficientPoints : public Error {
public:
    using Error::Error;
};

class NonPositiveValue : public Error {
public:
    using Error::Error;
};

}  // namespace cevlab
