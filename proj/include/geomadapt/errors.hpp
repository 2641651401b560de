#pragma once

#include <stdexcept>
#include <string>

namespace geomadapt {

/// Ill-conditioned or non-finite numerics.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model was queried before every phase window received data.
class UnfittedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A batch regression window has fewer independent samples than regressors.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(int window, const std::string& what)
      : std::runtime_error(what), window_(window) {}
  int window() const { return window_; }

 private:
  int window_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace geomadapt
