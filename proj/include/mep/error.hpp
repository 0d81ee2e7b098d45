#ifndef MEP_ERROR_HPP
#define MEP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mep {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the support or domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Invalid distribution or policy parameter (beta <= 0, alpha <= 0, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// The mean (or the requested moment) does not exist.
class MomentError : public Error {
public:
  using Error::Error;
};

/// Quadrature failed to reach its tolerance.
class NumericError : public Error {
public:
  NumericError(const std::string& what, double achieved)
      : Error(what + " (achieved error " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// Sample-shape problems: no exceedances, degenerate sample, zero normalizer.
class SampleError : public Error {
public:
  using Error::Error;
};

/// Windowed geometry with an empty clipped side.
class WindowError : public Error {
public:
  using Error::Error;
};

/// Invalid experiment or CLI configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed input text (model specs, data files, configs).
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace mep

#endif  // MEP_ERROR_HPP
