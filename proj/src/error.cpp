#include "geogami/error.hpp"

namespace geogami {

std::string_view errc_token(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_corner: return "invalid_corner";
    case Errc::retraction_exceeds_engagement: return "retraction_exceeds_engagement";
    case Errc::underdetermined_fit: return "underdetermined_fit";
    case Errc::non_finite: return "non_finite";
    case Errc::out_of_range: return "out_of_range";
    case Errc::zero_stiffness: return "zero_stiffness";
    case Errc::negative_contraction: return "negative_contraction";
    case Errc::radius_inversion: return "radius_inversion";
    case Errc::zero_mass: return "zero_mass";
    case Errc::degenerate_polygon: return "degenerate_polygon";
    case Errc::parse_error: return "parse_error";
    case Errc::config_error: return "config_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace geogami
