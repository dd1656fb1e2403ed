#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmscatter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the function.
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A numerical procedure failed to converge within its budget.
class NumericalError : public Error
{
  public:
    using Error::Error;
};

/// Inconsistent or unusable input data (files, scans, scene descriptions).
class InputError : public Error
{
  public:
    using Error::Error;
};

/// Geometry where a distance collapses to zero.
class DegenerateGeometry : public Error
{
  public:
    using Error::Error;
};

/// Parse failure tied to a 1-based line of a text file.
class ParseError : public InputError
{
  public:
    ParseError(std::size_t line, std::string const& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace mmscatter

namespace mmscatter {

/// Scan that cannot be fitted: too few points, or constant measured power.
class DegenerateScan : public InputError
{
  public:
    using InputError::InputError;
};

}  // namespace mmscatter
