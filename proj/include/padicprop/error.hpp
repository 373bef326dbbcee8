#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace padicprop {

enum class ErrorCode {
  parse_error,
  not_prime,
  ball_exponent_out_of_range,
  degenerate_alpha,
  zero_planck_constant,
  degenerate_kinetic_term,
  inconsistent_system_tag,
  unsupported_lagrangian,
  coincident_times,
  conjugate_point,
  outside_convergence_domain,
  degenerate_mixed_partial,
  degenerate_composition,
  cell_budget_exceeded,
  prime_mismatch,
  unsupported_pairing,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::not_prime: return "not_prime";
    case ErrorCode::ball_exponent_out_of_range: return "ball_exponent_out_of_range";
    case ErrorCode::degenerate_alpha: return "degenerate_alpha";
    case ErrorCode::zero_planck_constant: return "zero_planck_constant";
    case ErrorCode::degenerate_kinetic_term: return "degenerate_kinetic_term";
    case ErrorCode::inconsistent_system_tag: return "inconsistent_system_tag";
    case ErrorCode::unsupported_lagrangian: return "unsupported_lagrangian";
    case ErrorCode::coincident_times: return "coincident_times";
    case ErrorCode::conjugate_point: return "conjugate_point";
    case ErrorCode::outside_convergence_domain: return "outside_convergence_domain";
    case ErrorCode::degenerate_mixed_partial: return "degenerate_mixed_partial";
    case ErrorCode::degenerate_composition: return "degenerate_composition";
    case ErrorCode::cell_budget_exceeded: return "cell_budget_exceeded";
    case ErrorCode::prime_mismatch: return "prime_mismatch";
    case ErrorCode::unsupported_pairing: return "unsupported_pairing";
  }
  return "unknown";
}

/// Domain error carrying a stable code so callers (and the CLI) can tell
/// degeneracies apart without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace padicprop
