#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mudomains/types.hpp"

namespace mudomains {

/// Automorphism of the unit disc in canonical form
///   z -> e^{i rotation} (z - pole) / (1 - conj(pole) z),  |pole| < 1.
///
/// The alternate form omega (z - alpha) / (conj(alpha) z - 1) used for the
/// tetrablock generators is the same map with e^{i rotation} = -omega and
/// pole = alpha; see from_paper_form().
class MobiusTransform {
 public:
  MobiusTransform() = default;
  MobiusTransform(double rotation, cplx pole);

  static MobiusTransform identity() { return {}; }
  static MobiusTransform from_paper_form(cplx omega, cplx alpha);
  /// z -> e^{i theta} z
  static MobiusTransform rotation_by(double theta) { return {theta, 0.0}; }

  double rotation() const { return rotation_; }
  cplx pole() const { return pole_; }
  cplx unimodular() const { return std::polar(1.0, rotation_); }

  /// (omega, alpha) of the form omega (z - alpha) / (conj(alpha) z - 1).
  cplx paper_omega() const { return -unimodular(); }
  cplx paper_alpha() const { return pole_; }

  cplx apply(cplx z) const;
  cplx operator()(cplx z) const { return apply(z); }
  cplx derivative(cplx z) const;

  MobiusTransform inverse() const;

 private:
  double rotation_ = 0.0;
  cplx pole_ = 0.0;
};

/// outer o inner
MobiusTransform compose(const MobiusTransform& outer, const MobiusTransform& inner);

/// Compares (rotation, pole) after canonicalization; rotation mod 2pi.
bool approx_equal(const MobiusTransform& a, const MobiusTransform& b, double tol = 1e-12);

enum class MobiusKind { Identity, Elliptic, Parabolic, Hyperbolic };

struct MobiusClass {
  MobiusKind kind = MobiusKind::Identity;
  /// Elliptic: the interior fixed point. Parabolic: the double boundary
  /// fixed point. Hyperbolic: both boundary fixed points.
  std::vector<cplx> fixed_points;
};

/// Discriminant tolerance for parabolic detection.
inline constexpr double kParabolicTol = 1e-10;

MobiusClass mobius_classify(const MobiusTransform& m);

/// Attracting boundary fixed point of a fixed-point-free automorphism.
/// Throws HasInteriorFixedPoint for elliptic maps and the identity.
cplx denjoy_wolff_point(const MobiusTransform& m);

/// Smallest q <= max_period with m^q = id, for elliptic maps whose rotation
/// angle is a rational multiple of 2pi (to `tol`). Identity gives 1.
std::optional<int> algebraic_period(const MobiusTransform& m, int max_period = 64,
                                    double tol = 1e-9);

/// Finite Blaschke product of degree 1 or 2 vanishing at the origin:
///   B(z) = omega z                                   (degree 1)
///   B(z) = omega z (z - a) / (1 - conj(a) z)         (degree 2)
class BlaschkeProduct {
 public:
  BlaschkeProduct() = default;  // B(z) = z
  explicit BlaschkeProduct(cplx omega);
  BlaschkeProduct(cplx omega, cplx second_zero);

  int degree() const { return degree_; }
  cplx omega() const { return omega_; }
  /// Zero list; the first zero is always 0.
  std::vector<cplx> zeros() const;

  cplx apply(cplx z) const;
  cplx operator()(cplx z) const { return apply(z); }

 private:
  int degree_ = 1;
  cplx omega_ = 1.0;
  cplx zero_ = 0.0;
};

/// z -> factor * z with |factor| < 1.
struct DiscScale {
  cplx factor;
};

/// One step of a holomorphic self-map of the disc.
using DiscAtom = std::variant<MobiusTransform, BlaschkeProduct, DiscScale>;

/// Composition of disc atoms, applied first to last.
struct DiscWord {
  std::vector<DiscAtom> atoms;

  cplx apply(cplx z) const;
  cplx operator()(cplx z) const { return apply(z); }
  bool is_automorphism() const;
};

cplx apply(const DiscAtom& atom, cplx z);

/// Peak function (1 + conj(omega) z) / 2: equals 1 at omega, |.| < 1 elsewhere
/// on the closed disc.
cplx peak_function(cplx omega, cplx z);

cplx blaschke_apply(const BlaschkeProduct& b, cplx z);
cplx mobius_apply(const MobiusTransform& m, cplx z);

/// Roots of a complex polynomial.
struct PolyRoots {
  /// Highest degree first: c[0] z^n + c[1] z^{n-1} + ... + c[n].
  std::vector<cplx> coefficients;
  /// With multiplicity, sorted lexicographically by (re, im) after rounding
  /// to 1e-12.
  std::vector<cplx> roots;
};

struct RootOptions {
  double tolerance = 1e-12;
  int max_sweeps = 200;
};

/// Degrees 1-3 are solved in closed form, higher degrees with Aberth-Ehrlich.
PolyRoots poly_roots(std::span<const cplx> coefficients, const RootOptions& opts = {});

cplx poly_eval(std::span<const cplx> coefficients, cplx z);

/// Monic coefficients of prod (z - r_i), highest degree first.
std::vector<cplx> poly_from_roots(std::span<const cplx> roots);

}  // namespace mudomains
