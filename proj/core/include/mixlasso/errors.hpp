#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixlasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A column whose norm is below the normalization floor (or exactly zero).
class DegenerateColumn : public Error {
public:
    DegenerateColumn(std::size_t column, double norm, const std::string& context = {})
        : Error("column " + std::to_string(column) + " has degenerate norm " + std::to_string(norm) +
                (context.empty() ? std::string{} : " (" + context + ")")),
          column_(column), norm_(norm) {}

    std::size_t column() const noexcept { return column_; }
    double norm() const noexcept { return norm_; }

private:
    std::size_t column_;
    double norm_;
};

/// Cholesky factorization failed: the Gram matrix is singular or indefinite.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// A modelling assumption that is required to proceed does not hold
/// (e.g. an empty active cluster, or a negative radicand in a constant).
class AssumptionViolated : public Error {
public:
    AssumptionViolated(int assumption, const std::string& what)
        : Error("assumption " + std::to_string(assumption) + " violated: " + what), assumption_(assumption) {}

    int assumption() const noexcept { return assumption_; }

private:
    int assumption_;
};

}  // namespace mixlasso
