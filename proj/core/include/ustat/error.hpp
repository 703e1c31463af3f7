#pragma once

#include <stdexcept>
#include <string>

namespace ustat {

enum class Errc {
  domain_mismatch,
  invalid_argument,
  unsupported_measure,
  unsupported_kernel,
  symmetry_violation,
  regime_mismatch,
  regime_ambiguous,
  structure_mismatch,
  unpaired_singular_value,
  unknown_case,
  dimension_overflow,
  insufficient_data,
  not_a_permutation,
  config_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace ustat
