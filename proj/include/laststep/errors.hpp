#pragma once

#include <stdexcept>
#include <string>

namespace laststep {

enum class errc {
  ok = 0,
  horizon_too_small,
  nonpositive_scale,
  nonpositive_modulus,
  nonpositive_step,
  not_decreasing,
  unknown_family,
  invalid_sparsity,
  invalid_dimensions,
  dimension_mismatch,
  iterates_not_recorded,
  empty_range,
  support_mismatch,
  phase_out_of_range,
  level_too_small,
  insufficient_horizon,
  bad_config,
  io_error,
  out_of_range,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace laststep
