#ifndef TGP_ERRORS_HPP
#define TGP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tgp {

/// Invalid user-supplied configuration (bad hyperparameter, dimension mismatch, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// File-level failures: unreadable input, corrupt container, checksum mismatch.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: factorization breakdown, CG non-convergence, non-PD results.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tgp

#endif
