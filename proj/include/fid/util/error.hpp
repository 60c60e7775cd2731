// Error type carrying a stable machine-readable code plus a human message.
#pragma once

#include <stdexcept>
#include <string>

namespace fid {

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Codes are part of the tool contract; never rename without bumping the
// config schema version.
namespace errc {
inline constexpr const char* quadrature_nonconvergence = "quadrature_nonconvergence";
inline constexpr const char* zero_measure = "zero_measure";
inline constexpr const char* empty_truncation = "empty_truncation";
inline constexpr const char* unknown_name = "unknown_name";
inline constexpr const char* bracket_violation = "bracket_violation";
inline constexpr const char* not_monotone = "not_monotone";
inline constexpr const char* divergent_integral = "divergent_integral";
inline constexpr const char* ilog_violation = "ilog_violation";
inline constexpr const char* jump_cap_exceeded = "jump_cap_exceeded";
inline constexpr const char* non_hermitian = "non_hermitian";
inline constexpr const char* continuation_failure = "continuation_failure";
inline constexpr const char* degenerate_set = "degenerate_set";
inline constexpr const char* inadmissible_class = "inadmissible_class";
inline constexpr const char* invalid_config = "invalid_config";
inline constexpr const char* io_error = "io_error";
}  // namespace errc

}  // namespace fid
