#pragma once

#include <stdexcept>
#include <string>

namespace stlab {

// Requested work exceeds a configured ceiling (prime counts, discrepancy budgets).
struct resource_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact-computation budget exceeded; lower K or raise the budget.
struct budget_error : resource_limit_error {
  using resource_limit_error::resource_limit_error;
};

// Persistent trace cache failed validation (bad magic, label or checksum).
struct cache_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal cross-check failed; indicates an arithmetic bug, not bad input.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace stlab
