#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a physical model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Invalid configuration value; `path` is the dotted field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Integration produced a non-finite value.
class NumericalError : public Error {
 public:
  NumericalError(std::size_t channel, double z_m, const std::string& what)
      : Error(what + " (channel " + std::to_string(channel) + ", z = " + std::to_string(z_m) + " m)"),
        channel_(channel),
        z_(z_m) {}

  std::size_t channel() const noexcept { return channel_; }
  double z() const noexcept { return z_; }

 private:
  std::size_t channel_;
  double z_;
};

/// Spatial grid too coarse for the requested quadrature tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(int order, double estimate_db, double step_m, double tolerance_db)
      : Error("order " + std::to_string(order) + ": quadrature error estimate " + std::to_string(estimate_db) +
              " dB exceeds " + std::to_string(tolerance_db) + " dB at step " + std::to_string(step_m) + " m"),
        order_(order),
        estimate_db_(estimate_db),
        step_m_(step_m) {}

  int order() const noexcept { return order_; }
  double estimate_db() const noexcept { return estimate_db_; }
  double step_m() const noexcept { return step_m_; }

 private:
  int order_;
  double estimate_db_;
  double step_m_;
};

/// Order selection hit its order limit; carries the per-order trace.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> theta, std::vector<double> bound_db)
      : Error(what), theta_(std::move(theta)), bound_db_(std::move(bound_db)) {}

  const std::vector<double>& theta() const noexcept { return theta_; }
  const std::vector<double>& bound_db() const noexcept { return bound_db_; }

 private:
  std::vector<double> theta_;
  std::vector<double> bound_db_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace srs
