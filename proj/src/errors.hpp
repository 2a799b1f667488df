#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

// Failure categories shared across the library.  The C shell maps these
// one-to-one onto status codes, so additions here need a matching entry there.
enum class Errc {
  invalid_argument,
  domain_error,
  light_cone_singularity,
  convergence_failure,
  dimension_exceeded,
  numerical_failure,
  ordering_error,
  degenerate_input,
  zero_state,
  invalid_levels,
  plan_mismatch,
  empty_counts,
  length_mismatch,
  denominator_underflow,
  eigenstate_ambiguity,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::domain_error: return "domain_error";
    case Errc::light_cone_singularity: return "light_cone_singularity";
    case Errc::convergence_failure: return "convergence_failure";
    case Errc::dimension_exceeded: return "dimension_exceeded";
    case Errc::numerical_failure: return "numerical_failure";
    case Errc::ordering_error: return "ordering_error";
    case Errc::degenerate_input: return "degenerate_input";
    case Errc::zero_state: return "zero_state";
    case Errc::invalid_levels: return "invalid_levels";
    case Errc::plan_mismatch: return "plan_mismatch";
    case Errc::empty_counts: return "empty_counts";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::denominator_underflow: return "denominator_underflow";
    case Errc::eigenstate_ambiguity: return "eigenstate_ambiguity";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        message_(what) {}
  Errc code() const { return code_; }
  // The description alone, without the errc_name prefix what() carries.
  const std::string& message() const { return message_; }

 private:
  Errc code_;
  std::string message_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) raise(code, what);
}

}  // namespace lightcone
