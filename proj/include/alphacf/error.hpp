#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alphacf {

enum class errc {
  mixed_radicand,
  division_by_zero,
  pole_at_input,
  negative_discriminant,
  degenerate_linear,
  parse_error,
  invalid_string,
  empty_interval,
  point_interval,
  out_of_domain,
  orbit_hit_zero,
  empty_cylinder,
  verification_failed,
  quotient_below_two,
  outside_matching_interval,
  ill_conditioned,
  invalid_argument,
};

constexpr std::string_view to_string(errc e) noexcept {
  switch (e) {
    case errc::mixed_radicand: return "MixedRadicand";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::pole_at_input: return "PoleAtInput";
    case errc::negative_discriminant: return "NegativeDiscriminant";
    case errc::degenerate_linear: return "DegenerateLinear";
    case errc::parse_error: return "ParseError";
    case errc::invalid_string: return "InvalidString";
    case errc::empty_interval: return "EmptyInterval";
    case errc::point_interval: return "PointInterval";
    case errc::out_of_domain: return "OutOfDomain";
    case errc::orbit_hit_zero: return "OrbitHitZero";
    case errc::empty_cylinder: return "EmptyCylinder";
    case errc::verification_failed: return "VerificationFailed";
    case errc::quotient_below_two: return "QuotientBelowTwo";
    case errc::outside_matching_interval: return "OutsideMatchingInterval";
    case errc::ill_conditioned: return "IllConditioned";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace alphacf
