#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symdyn {

/// Malformed input: bad symbol, bad parameter, missing configuration entry.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A family constructor rejected its parameters (validation failure).
class ConstructionError : public InputError {
public:
    using InputError::InputError;
};

/// Enumeration hit its node cap. Carries how far it got.
class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted(std::uint64_t reached, std::uint64_t budget)
        : std::runtime_error("enumeration budget exhausted after " + std::to_string(reached) +
                             " nodes (budget " + std::to_string(budget) + ")"),
          reached_(reached), budget_(budget) {}

    std::uint64_t reached() const noexcept { return reached_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t reached_;
    std::uint64_t budget_;
};

/// Numerical or logical inconsistency (bracket inversion, identity violated,
/// non-convergence, reducible transfer graph).
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace symdyn
