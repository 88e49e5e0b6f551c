#ifndef BUBBLE_ERROR_HPP_
#define BUBBLE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <string_view>

namespace bubble
{

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_input,
  domain,
  unsupported_direction,
  insufficient_data,
  invalid_equilibrium,
  degenerate_calibration,
  no_stationary_law,
  numerical,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::unsupported_direction: return "unsupported direction";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::invalid_equilibrium: return "invalid equilibrium";
    case ErrorKind::degenerate_calibration: return "degenerate calibration";
    case ErrorKind::no_stationary_law: return "no stationary law";
    case ErrorKind::numerical: return "numerical failure";
  }
  return "unknown";
}

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message, std::string step = {})
      : std::runtime_error(compose(kind, message, step)), kind_(kind), message_(message),
        step_(std::move(step))
  {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Calibration step tag ("step 2" etc.), empty elsewhere.
  const std::string & step() const noexcept { return step_; }

  /// Rethrow with a step tag attached, keeping the kind.
  Error with_step(std::string step) const { return Error(kind_, message_, std::move(step)); }

  const std::string & message() const noexcept { return message_; }

private:
  static std::string compose(ErrorKind kind, const std::string & message, const std::string & step)
  {
    std::string out;
    if (!step.empty()) { out += step + ": "; }
    out += std::string(to_string(kind)) + ": " + message;
    return out;
  }

  ErrorKind kind_;
  std::string message_;
  std::string step_;
};

/// Exit code contract of the command-line tool.
inline constexpr int exit_code(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::degenerate_calibration:
    case ErrorKind::no_stationary_law: return 3;
    case ErrorKind::numerical: return 4;
    default: return 2;
  }
}

namespace detail
{

inline void require(bool condition, ErrorKind kind, const std::string & message)
{
  if (!condition) { throw Error(kind, message); }
}

}  // namespace detail

}  // namespace bubble

#endif  // BUBBLE_ERROR_HPP_
