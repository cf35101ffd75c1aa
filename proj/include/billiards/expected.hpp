#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace billiards {

/// Recoverable outcomes of tracing and boundary queries. Monte Carlo drivers
/// count these instead of aborting, so they travel by value.
enum class TraceError {
  trapped,           // no boundary hit within the length cap
  degenerate_start,  // boundary start with a strictly outward direction
  not_on_boundary,   // boundary operation on an interior point
  outside_domain,    // start point outside the closed domain
  wrong_stratum,     // causality map applied to an outgoing phase point
};

constexpr std::string_view to_string(TraceError e) {
  switch (e) {
    case TraceError::trapped: return "trapped";
    case TraceError::degenerate_start: return "degenerate_start";
    case TraceError::not_on_boundary: return "not_on_boundary";
    case TraceError::outside_domain: return "outside_domain";
    case TraceError::wrong_stratum: return "wrong_stratum";
  }
  return "unknown";
}

/// Thrown when a caller insists on a value that is not there.
class TraceFailure : public std::runtime_error {
 public:
  explicit TraceFailure(TraceError e)
      : std::runtime_error("trace failure: " + std::string(to_string(e))), error_(e) {}
  TraceError error() const noexcept { return error_; }

 private:
  TraceError error_;
};

/// Minimal value-or-error holder (std::expected is C++23).
template <class T, class E = TraceError>
class Expected {
 public:
  Expected(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Expected(E error) : state_(error) {}             // NOLINT(google-explicit-constructor)

  bool has_value() const noexcept { return state_.index() == 0; }
  explicit operator bool() const noexcept { return has_value(); }

  const T& value() const& {
    if (!has_value()) throw TraceFailure(std::get<1>(state_));
    return std::get<0>(state_);
  }
  T& value() & {
    if (!has_value()) throw TraceFailure(std::get<1>(state_));
    return std::get<0>(state_);
  }
  E error() const { return std::get<1>(state_); }

  const T& operator*() const& { return std::get<0>(state_); }
  const T* operator->() const { return &std::get<0>(state_); }

 private:
  std::variant<T, E> state_;
};

/// Errors that are a misuse of the API or an infeasible request rather than a
/// per-sample outcome.
class BilliardError : public std::runtime_error {
 public:
  enum class Code { invalid_table, unsupported, body_too_small, too_many_trapped, degenerate_set, empty_sequence, invalid_argument };

  BilliardError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

constexpr std::string_view to_string(BilliardError::Code c) {
  switch (c) {
    case BilliardError::Code::invalid_table: return "invalid_table";
    case BilliardError::Code::unsupported: return "unsupported";
    case BilliardError::Code::body_too_small: return "body_too_small";
    case BilliardError::Code::too_many_trapped: return "too_many_trapped";
    case BilliardError::Code::degenerate_set: return "degenerate_set";
    case BilliardError::Code::empty_sequence: return "empty_sequence";
    case BilliardError::Code::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace billiards
