#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mudomains {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  PoleOnBoundary,
  HasInteriorFixedPoint,
  DidNotConverge,
  ZeroLeadingCoefficient,
  InvalidArgument,
  Singular,
  BetaOutOfRange,
  GeodesicArgOutOfDisc,
  NotFixedPointFree,
  PointOutsideDomain,
  NormalizationSingular,
  DenominatorSingular,
  AtomRangeViolation,
  InvalidSelfMap,
  NotDivergent,
  NoFixedPointFound,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Angle reduced to [0, 2pi).
double wrap_angle(double theta);

/// Signed distance between two angles, in (-pi, pi].
double angle_diff(double a, double b);

}  // namespace mudomains
