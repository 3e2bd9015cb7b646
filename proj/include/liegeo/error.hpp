#pragma once

#include <stdexcept>
#include <string>

namespace liegeo {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class Errc {
  dimension_mismatch,
  invalid_argument,
  not_bracket_generating,
  not_in_span,
  outside_branch,
  non_finite,
  zero_field,
  unnormalized_costate,
  outside_chart,
  step_too_large,
  inconsistent_representation,
  parse_error,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace liegeo
