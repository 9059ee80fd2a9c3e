#pragma once

#include <stdexcept>
#include <string>

namespace permwalk {

// A vertex, neighbor or permutation image falls outside the truncated tree.
class BoundaryOverflow : public std::out_of_range {
public:
  explicit BoundaryOverflow(const std::string& what) : std::out_of_range(what) {}
};

// Exhaustive enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// A permutation spec is not injective on the set it was applied to.
class NotInjective : public std::runtime_error {
public:
  explicit NotInjective(const std::string& what) : std::runtime_error(what) {}
};

} // namespace permwalk
