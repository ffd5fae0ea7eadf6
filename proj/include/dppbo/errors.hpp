#pragma once

#include <stdexcept>
#include <string>

namespace dppbo {

// Bad caller input (dimension mismatch, out-of-box point, invalid config).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Loss of positive definiteness or other floating-point breakdown.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem size exceeds an enumeration/construction cap.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested subset size is not supported by the kernel's rank.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Posterior mean read after a hallucinated (variance-only) update.
struct StaleMeanError : std::logic_error {
  explicit StaleMeanError(const std::string& msg) : std::logic_error(msg) {}
};

// All candidate points are numerically determined (sigma ~ 0).
struct DegeneratePosteriorError : std::runtime_error {
  explicit DegeneratePosteriorError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dppbo
