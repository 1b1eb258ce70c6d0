#pragma once

#include <stdexcept>
#include <string>

namespace mfdiff {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside its mathematical domain (t outside [0,T], s outside [s0,s1], ...).
struct DomainError : Error {
  using Error::Error;
};

// API contract violation: shape mismatch, wrong conditioning mode, nonmonotone grid.
struct ContractError : Error {
  using Error::Error;
};

// Invalid or inconsistent configuration (bad schedule, empty dataset, resolution mismatch).
struct ConfigError : Error {
  using Error::Error;
};

// Persisted data failed validation (bad magic, size mismatch, unknown schema).
struct IntegrityError : Error {
  using Error::Error;
};

// NaN/Inf encountered where finite values are required (training or sampling divergence).
struct NumericsError : Error {
  using Error::Error;
};

// Degenerate data: zero-variance dataset, zero-norm truth field.
struct DegenerateError : Error {
  using Error::Error;
};

// Bad command-line usage; maps to exit code 2 in the CLI.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace mfdiff
