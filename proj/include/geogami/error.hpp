#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geogami {

enum class Errc {
  invalid_argument,
  invalid_corner,
  retraction_exceeds_engagement,
  underdetermined_fit,
  non_finite,
  out_of_range,
  zero_stiffness,
  negative_contraction,
  radius_inversion,
  zero_mass,
  degenerate_polygon,
  parse_error,
  config_error,
  io_error,
};

/// Stable token used in CLI diagnostics.
std::string_view errc_token(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace geogami
