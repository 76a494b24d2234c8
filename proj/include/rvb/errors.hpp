#pragma once

#include <stdexcept>
#include <string>

namespace rvb {

// Invalid quantum numbers or parameters outside a function's stated domain.
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Request exceeds a hard size limit (state vectors, dense diagonalization).
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check failed; indicates a bug, not bad input.
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace rvb
