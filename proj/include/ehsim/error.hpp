#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ehsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A geometric parameter (volume, width, length, rod length...) is non-positive or inconsistent.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Input lies outside the validity domain of a model (e.g. squeeze at or beyond full collapse).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An optional model parameter needed by the requested computation is absent.
class MissingParameter : public Error {
 public:
  using Error::Error;
};

/// Every calibration point has zero squeezed area, so K is unobservable.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// Drive waveform would exceed the dielectric breakdown limit.
class BreakdownRisk : public Error {
 public:
  BreakdownRisk(const std::string& what, double peak_kv) : Error(what), peak_kv_(peak_kv) {}
  double peak_kv() const { return peak_kv_; }

 private:
  double peak_kv_;
};

/// Requested force target is out of reach of the device at maximum voltage.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A trace is too short, empty or never crosses the levels a metric needs.
class TraceError : public Error {
 public:
  using Error::Error;
};

/// Parameter struct failed validation. field() names the offending entry.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace ehsim
