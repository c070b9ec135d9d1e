// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vbohm {

/// Invalid argument or an input outside the validated domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, ODE integration, root search) failed.
/// `estimate` carries the achieved error estimate when one exists.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what, double estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

private:
  double estimate_;
};

class IntegrationError : public NumericError {
public:
  using NumericError::NumericError;
};

/// E <= V_T somewhere on the grid; `position` is the first offending x.
class TurningPointError : public DomainError {
public:
  TurningPointError(const std::string& what, double position)
      : DomainError(what), position_(position) {}
  double position() const noexcept { return position_; }

private:
  double position_;
};

/// The requested bound state does not exist in the given well.
class NoSuchStateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AnalysisError : public NumericError {
public:
  using NumericError::NumericError;
};

class SearchError : public NumericError {
public:
  using NumericError::NumericError;
};

} // namespace vbohm
