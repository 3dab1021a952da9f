#pragma once

#include <stdexcept>
#include <string>

namespace nsopt {

struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomainError : std::runtime_error {
  explicit OutOfDomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
  double achieved_residual;
  explicit SolverError(const std::string& msg, double residual = -1.0)
      : std::runtime_error(msg), achieved_residual(residual) {}
};

struct NonlinearSolveError : std::runtime_error {
  explicit NonlinearSolveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OptError : std::runtime_error {
  explicit OptError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DiagnosticError : std::runtime_error {
  explicit DiagnosticError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nsopt
