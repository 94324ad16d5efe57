#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "mudomains/disc.hpp"

namespace mudomains {

enum class Domain { G2, G3, Tetra, Penta };

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view name);
/// Complex dimension: 2 for G2, 3 otherwise.
int dimension(Domain d);

/// (s, p) = (z1 + z2, z1 z2).
struct SymPoint2 {
  cplx s;
  cplx p;
};

/// Elementary symmetric values of a triple.
struct SymPoint3 {
  cplx s1;
  cplx s2;
  cplx s3;
};

struct TetraPoint {
  cplx x1;
  cplx x2;
  cplx x3;
};

struct PentaPoint {
  cplx a;
  cplx s;
  cplx p;
};

/// Domain-tagged coordinates used by the iteration layer. Unused trailing
/// coordinates are zero.
struct DomainPoint {
  Domain domain = Domain::G2;
  std::array<cplx, 3> z{};

  int dim() const { return dimension(domain); }
};

DomainPoint to_domain_point(const SymPoint2& pt);
DomainPoint to_domain_point(const SymPoint3& pt);
DomainPoint to_domain_point(const TetraPoint& pt);
DomainPoint to_domain_point(const PentaPoint& pt);
SymPoint2 as_sym2(const DomainPoint& pt);
SymPoint3 as_sym3(const DomainPoint& pt);
TetraPoint as_tetra(const DomainPoint& pt);
PentaPoint as_penta(const DomainPoint& pt);

/// Max-norm distance between coordinate vectors of the same domain.
double max_dist(const DomainPoint& a, const DomainPoint& b);

enum class Status { Inside, Boundary, Outside };
std::string_view to_string(Status s);

inline constexpr double kBoundaryTol = 1e-9;

struct MembershipVerdict {
  Status status = Status::Inside;
  /// Slack in the defining inequality; positive inside.
  double margin = 0.0;
  std::optional<std::string> witness;
};

MembershipVerdict verdict_from_margin(double margin, double boundary_tol = kBoundaryTol);

// ---------------------------------------------------------------------------
// Symmetrization

SymPoint2 symmetrize2(cplx z1, cplx z2);
SymPoint3 symmetrize3(cplx z1, cplx z2, cplx z3);
std::array<cplx, 2> desymmetrize2(const SymPoint2& pt);
std::array<cplx, 3> desymmetrize3(const SymPoint3& pt);

// ---------------------------------------------------------------------------
// Symmetrized bidisc

/// (2 omega p - s) / (2 - omega s). Throws Singular if |2 - omega s| <= 1e-14.
cplx magic_phi(cplx omega, const SymPoint2& pt);
/// The conjugate-indexed member (2 conj(omega) p - s) / (2 - conj(omega) s).
cplx magic_phi_conj(cplx omega, const SymPoint2& pt);

struct MagicSupOptions {
  int grid_points = 4096;
  double refine_tol = 1e-12;
};

struct MagicSup {
  double value = 0.0;
  cplx argmax = 1.0;
};

/// sup over the unit circle of |Phi_omega(s, p)|: grid search refined by
/// golden-section around the grid argmax. Singular omegas are skipped.
MagicSup magic_sup(const SymPoint2& pt, const MagicSupOptions& opts = {});

/// Membership through the magic-function family:
/// margin = min(2 - |s|, 1 - sup |Phi_omega|), witness = argmax omega.
MembershipVerdict g2_membership(const SymPoint2& pt, const MagicSupOptions& opts = {},
                                double boundary_tol = kBoundaryTol);

/// Membership through the roots of z^2 - s z + p: margin = 1 - max |root|.
MembershipVerdict g2_membership_oracle(const SymPoint2& pt, double boundary_tol = kBoundaryTol);

MembershipVerdict g3_membership(const SymPoint3& pt, double boundary_tol = kBoundaryTol);

MembershipVerdict tetra_membership(const TetraPoint& pt, double boundary_tol = kBoundaryTol);

/// Denominator used in the pentablock's beta = (s - conj(s) p) / den.
enum class BetaVariant {
  Paper,       ///< (1 - |p|)^2
  Literature,  ///< 1 - |p|^2
};

std::string_view to_string(BetaVariant v);
std::optional<BetaVariant> parse_beta_variant(std::string_view name);

cplx penta_beta(cplx s, cplx p, BetaVariant variant);

/// |1 - (s conj(beta) / 2) / (1 + sqrt(1 - |beta|^2))|. Throws BetaOutOfRange
/// if |beta| > 1 + 1e-12.
double penta_bound(cplx s, cplx p, BetaVariant variant);

MembershipVerdict penta_membership(const PentaPoint& pt, BetaVariant variant = BetaVariant::Paper,
                                   double boundary_tol = kBoundaryTol);

/// s^2 = 4p (to 1e-10) and Inside G2.
bool royal_membership(const SymPoint2& pt);
/// x3 = x1 x2 (to 1e-10) and Inside the tetrablock.
bool triangular_membership(const TetraPoint& pt);

/// lambda -> pi_2(B(sqrt(lambda)), B(-sqrt(lambda))).
SymPoint2 geodesic_form1(const BlaschkeProduct& b, cplx lambda);
/// lambda -> pi_2(lambda, a(lambda)) for a fixed-point-free automorphism a.
SymPoint2 geodesic_form2(const MobiusTransform& a, cplx lambda);

/// (2 e^{i theta}, e^{2 i theta}).
SymPoint2 boundary_param_royal(double theta);

/// Max-norm distance from a point to the royal boundary circle.
double distance_to_royal_circle(const SymPoint2& pt);

// ---------------------------------------------------------------------------
// Generic dispatch for the iteration layer

/// Cheap margin used along orbits: root-based for G2 and G3, the defining
/// inequality for the tetrablock, and min(G2 root margin, bound - |a|) with
/// the literature beta for the pentablock.
double orbit_margin(const DomainPoint& pt);

/// Full membership verdict for any domain (G2 uses the magic-function test).
MembershipVerdict membership(const DomainPoint& pt, BetaVariant variant = BetaVariant::Paper);

}  // namespace mudomains
