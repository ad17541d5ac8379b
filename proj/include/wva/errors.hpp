#pragma once

#include <stdexcept>
#include <string>

namespace wva {

// Exit-code category used by the CLI front-end:
//   1 = configuration / usage error
//   2 = physics-regime error (request outside the validity of the model)
//   3 = numerical failure
enum class ErrorCategory : int { config = 1, regime = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), category_(cat) {}
  ErrorCategory category() const { return category_; }

private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

// --- regime errors -----------------------------------------------------------

struct TruncationOverflow : Error {
  explicit TruncationOverflow(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

struct WeakRegimeViolation : Error {
  explicit WeakRegimeViolation(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

struct ZeroProbability : Error {
  explicit ZeroProbability(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

struct NegativeField : Error {
  explicit NegativeField(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

struct OffResonance : Error {
  explicit OffResonance(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

// --- numerical errors --------------------------------------------------------

struct NonFinite : Error {
  explicit NonFinite(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct LayoutMismatch : Error {
  explicit LayoutMismatch(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct NonHermitian : Error {
  explicit NonHermitian(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct NonConverged : Error {
  explicit NonConverged(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct NonPhysicalState : Error {
  explicit NonPhysicalState(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct DegenerateDistribution : Error {
  explicit DegenerateDistribution(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

struct CalibrationFailed : Error {
  explicit CalibrationFailed(const std::string& msg) : Error(ErrorCategory::numerical, msg) {}
};

}  // namespace wva
