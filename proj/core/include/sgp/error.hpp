#pragma once

#include <stdexcept>
#include <string>

namespace sgp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid topology request (node count, parity, offset collision, bad matrix).
class TopologyError : public Error {
public:
  using Error::Error;
};

/// Dimension mismatch between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// De-bias requested with a non-positive push-sum weight.
class DebiasError : public Error {
public:
  using Error::Error;
};

/// A message delay exceeds the configured bound tau.
class DelayBoundError : public Error {
public:
  using Error::Error;
};

/// Protocol violation in the message runtime (e.g. a missed delivery).
class ProtocolError : public Error {
public:
  using Error::Error;
};

/// A baseline's structural precondition is violated (e.g. D-PSGD on an
/// asymmetric schedule).
class BaselineError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Contraction fit cannot be performed on the requested window.
class FitWindowError : public Error {
public:
  using Error::Error;
};

}  // namespace sgp
