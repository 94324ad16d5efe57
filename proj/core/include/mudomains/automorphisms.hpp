#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mudomains/domains.hpp"

namespace mudomains {

/// Automorphism of the symmetrized polydisc G_n (n = 2, 3) induced by a disc
/// automorphism h acting on every root: pi_n(z) -> pi_n(h(z_1), ..., h(z_n)).
struct GnAut {
  int n = 2;
  MobiusTransform h;

  GnAut inverse() const { return {n, h.inverse()}; }
};

/// Checked: throws PointOutsideDomain unless the point is inside G_n.
SymPoint2 gn_apply(const GnAut& f, const SymPoint2& pt);
SymPoint3 gn_apply(const GnAut& f, const SymPoint3& pt);

/// Unchecked evaluation on raw symmetric coordinates (size n). The image
/// polynomial is obtained by substituting h^{-1} into prod (z - z_i), so no
/// roots are extracted and nearly royal points stay well-conditioned.
void gn_map(const MobiusTransform& h, std::span<const cplx> sym, std::span<cplx> out);

// ---------------------------------------------------------------------------
// Tetrablock

/// L_nu: left multiplication of [x3, -x1; x2, -1] by the matrix of nu.
struct TetraL {
  MobiusTransform nu;
};
/// R_chi: right multiplication by the matrix of chi.
struct TetraR {
  MobiusTransform chi;
};
/// (x1, x2, x3) -> (x2, x1, x3).
struct TetraF {};

using TetraAtom = std::variant<TetraL, TetraR, TetraF>;

/// Free word [A1, ..., Ak] denoting the composition A1 o ... o Ak, so Ak acts
/// first. Words are not reduced to a normal form.
struct TetraAut {
  std::vector<TetraAtom> word;
};

TetraPoint tetra_L(const MobiusTransform& nu, const TetraPoint& x);
TetraPoint tetra_R(const MobiusTransform& chi, const TetraPoint& x);
TetraPoint tetra_F(const TetraPoint& x);

/// Checked: throws PointOutsideDomain unless x is inside the tetrablock.
TetraPoint tetra_apply(const TetraAut& f, const TetraPoint& x);
TetraPoint tetra_apply_unchecked(const TetraAut& f, const TetraPoint& x);
TetraAut tetra_invert(const TetraAut& f);
/// f o g
TetraAut tetra_compose(const TetraAut& f, const TetraAut& g);

/// The disc automorphism by which R_chi acts on the second coordinate of the
/// triangular set {(a, b, ab)}: b -> (conj(beta) - sigma b) / (1 - sigma beta b).
MobiusTransform tetra_R_on_triangle(const MobiusTransform& chi);

// ---------------------------------------------------------------------------
// Pentablock

/// f_{omega, gamma}(a, l1 + l2, l1 l2) =
///   (omega (1 - |alpha|^2) a / (1 - conj(alpha)(l1 + l2) + conj(alpha)^2 l1 l2),
///    gamma(l1) + gamma(l2), gamma(l1) gamma(l2)),   alpha = gamma^{-1}(0).
struct PentaAut {
  cplx omega = 1.0;
  MobiusTransform gamma;

  cplx alpha() const { return gamma.pole(); }
  PentaAut inverse() const { return {std::conj(omega), gamma.inverse()}; }
};

/// Checked against the pentablock with the literature beta.
PentaPoint penta_apply(const PentaAut& f, const PentaPoint& pt);
PentaPoint penta_apply_unchecked(const PentaAut& f, const PentaPoint& pt);

// ---------------------------------------------------------------------------

using Automorphism = std::variant<GnAut, TetraAut, PentaAut>;

Domain domain_of(const Automorphism& f);
DomainPoint apply(const Automorphism& f, const DomainPoint& pt);
DomainPoint apply_unchecked(const Automorphism& f, const DomainPoint& pt);
Automorphism inverse(const Automorphism& f);

struct PeriodOptions {
  int max_period = 64;
  double tol = 1e-9;
};

/// Smallest p <= max_period with max over probes of |f^p(x) - x| < tol.
std::optional<int> periodicity_detect(const Automorphism& f, std::span<const DomainPoint> probes,
                                      const PeriodOptions& opts = {});

}  // namespace mudomains
