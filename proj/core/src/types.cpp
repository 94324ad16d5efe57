#include "mudomains/types.hpp"

#include <cmath>

namespace mudomains {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PoleOnBoundary: return "PoleOnBoundary";
    case ErrorCode::HasInteriorFixedPoint: return "HasInteriorFixedPoint";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::GeodesicArgOutOfDisc: return "GeodesicArgOutOfDisc";
    case ErrorCode::NotFixedPointFree: return "NotFixedPointFree";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::NormalizationSingular: return "NormalizationSingular";
    case ErrorCode::DenominatorSingular: return "DenominatorSingular";
    case ErrorCode::AtomRangeViolation: return "AtomRangeViolation";
    case ErrorCode::InvalidSelfMap: return "InvalidSelfMap";
    case ErrorCode::NotDivergent: return "NotDivergent";
    case ErrorCode::NoFixedPointFound: return "NoFixedPointFound";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double angle_diff(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

}  // namespace mudomains
