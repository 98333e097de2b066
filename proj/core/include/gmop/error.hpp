#pragma once

#include <stdexcept>
#include <string>

namespace gmop {

/// Out-of-domain argument (non-positive variance, bad node id, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The linear mean dynamics are not contractive (spectral radius >= 1).
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, double spectral_radius)
      : std::runtime_error(what), spectral_radius_(spectral_radius) {}
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

/// A linear solve was numerically singular.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// Malformed input file (config, edge list, trajectory).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config value rejected; the message starts with the field path.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& reason)
      : std::runtime_error(field + ": " + reason), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gmop
