#pragma once

#include <stdexcept>
#include <string>

namespace mcvae {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated call contract (shape mismatch, wrong space, reused record, ...).
struct ContractError : Error {
  using Error::Error;
};

// Numeric input left the admissible domain by more than the clamping budget.
struct DomainError : Error {
  using Error::Error;
};

}  // namespace mcvae
