#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbayes {

enum class ErrorKind {
  validation,         // malformed input, broken invariants
  numerical_failure,  // iteration cap or breakdown in a numerical kernel
  not_psd,
  singular_state,
  ill_conditioned,
  empty_model,
  capability,  // optional attachment (derivatives, scores, n == 2, ...) missing
  unsupported_configuration,
  singular_information,
  solver_failure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qbayes
