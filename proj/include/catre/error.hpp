#pragma once

#include <stdexcept>
#include <string>

namespace catre {

enum class ErrorCode {
  InvalidArgument,
  DivergentIntegral,
  NoConvergence,
  ZeroLikelihood,
  StepTooLarge,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

/// A tilted integral whose integrand is not integrable (tilt at or above the decay rate).
class DivergentIntegral : public Error {
 public:
  explicit DivergentIntegral(const std::string& what) : Error(ErrorCode::DivergentIntegral, what) {}
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error(ErrorCode::NoConvergence, what) {}
};

/// Every family with positive posterior weight assigns zero density to the observed claim.
class ZeroLikelihood : public Error {
 public:
  explicit ZeroLikelihood(const std::string& what) : Error(ErrorCode::ZeroLikelihood, what) {}
};

/// The explicit backward step lost positivity or exceeded the a-priori bound on g.
class StepTooLarge : public Error {
 public:
  explicit StepTooLarge(const std::string& what) : Error(ErrorCode::StepTooLarge, what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = -1)
      : Error(ErrorCode::Config, line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace catre
