#pragma once

#include <stdexcept>
#include <string>

namespace sojourn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An adaptive series or search did not reach its tolerance within the configured budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Two independent numerical routes disagreed by more than their tolerance.
class CrossValidationError : public Error {
 public:
  using Error::Error;
};

/// The covariance is not integrable: ∫|ρ| = ∞.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class FitMismatchError : public Error {
 public:
  using Error::Error;
};

/// The circulant embedding has eigenvalues below the round-off band after all padding escalations.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sojourn
