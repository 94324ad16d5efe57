#include "mudomains/automorphisms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mudomains {

namespace {

void require_not_outside(const MembershipVerdict& v, const char* what) {
  if (v.status == Status::Outside) throw Error(ErrorCode::PointOutsideDomain, what);
}

// Linear polynomial c0 + c1 w, and products thereof, stored low order first.
using Poly = std::array<cplx, 4>;

Poly mul_linear(const Poly& p, int deg, cplx c0, cplx c1) {
  Poly out{};
  for (int i = 0; i <= deg; ++i) {
    out[i] += p[i] * c0;
    out[i + 1] += p[i] * c1;
  }
  return out;
}

}  // namespace

void gn_map(const MobiusTransform& h, std::span<const cplx> sym, std::span<cplx> out) {
  const int n = static_cast<int>(sym.size());
  // h^{-1}(w) = (c w + d) / (e w + f)
  const MobiusTransform inv = h.inverse();
  const cplx c = inv.unimodular(), d = -inv.unimodular() * inv.pole();
  const cplx e = -std::conj(inv.pole()), f = 1.0;
  // Q(w) = sum_k (-1)^k s_k X^{n-k} Y^k with X = d + c w, Y = f + e w.
  Poly q{};
  for (int k = 0; k <= n; ++k) {
    const cplx coeff = (k == 0 ? cplx(1.0) : sym[k - 1]) * (k % 2 ? -1.0 : 1.0);
    Poly term{};
    term[0] = coeff;
    int deg = 0;
    for (int i = 0; i < n - k; ++i) term = mul_linear(term, deg++, d, c);
    for (int i = 0; i < k; ++i) term = mul_linear(term, deg++, f, e);
    for (int i = 0; i <= n; ++i) q[i] += term[i];
  }
  const cplx lead = q[n];
  if (std::abs(lead) < 1e-300) throw Error(ErrorCode::DenominatorSingular, "image polynomial degenerates");
  // Monic w^n + q_{n-1}/lead w^{n-1} + ... ; s_k = (-1)^k q_{n-k} / lead.
  for (int k = 1; k <= n; ++k) out[k - 1] = (k % 2 ? -1.0 : 1.0) * q[n - k] / lead;
}

SymPoint2 gn_apply(const GnAut& f, const SymPoint2& pt) {
  if (f.n != 2) throw Error(ErrorCode::InvalidArgument, "GnAut dimension mismatch");
  require_not_outside(g2_membership_oracle(pt), "point outside G2");
  const cplx in[2] = {pt.s, pt.p};
  cplx out[2];
  gn_map(f.h, in, out);
  return {out[0], out[1]};
}

SymPoint3 gn_apply(const GnAut& f, const SymPoint3& pt) {
  if (f.n != 3) throw Error(ErrorCode::InvalidArgument, "GnAut dimension mismatch");
  require_not_outside(g3_membership(pt), "point outside G3");
  const cplx in[3] = {pt.s1, pt.s2, pt.s3};
  cplx out[3];
  gn_map(f.h, in, out);
  return {out[0], out[1], out[2]};
}

// ---------------------------------------------------------------------------

TetraPoint tetra_L(const MobiusTransform& nu, const TetraPoint& x) {
  const cplx w = nu.paper_omega(), a = nu.paper_alpha(), ca = std::conj(a);
  const cplx m11 = w * x.x3 - w * a * x.x2;
  const cplx m12 = -w * x.x1 + w * a;
  const cplx m21 = ca * x.x3 - x.x2;
  const cplx m22 = 1.0 - ca * x.x1;
  if (std::abs(m22) < 1e-14) throw Error(ErrorCode::NormalizationSingular, "L normalization");
  const cplx lambda = -1.0 / m22;
  return {-lambda * m12, lambda * m21, lambda * m11};
}

TetraPoint tetra_R(const MobiusTransform& chi, const TetraPoint& x) {
  const cplx s = chi.paper_omega(), b = chi.paper_alpha(), cb = std::conj(b);
  const cplx m11 = s * x.x3 - cb * x.x1;
  const cplx m12 = x.x1 - s * b * x.x3;
  const cplx m21 = s * x.x2 - cb;
  const cplx m22 = 1.0 - s * b * x.x2;
  if (std::abs(m22) < 1e-14) throw Error(ErrorCode::NormalizationSingular, "R normalization");
  const cplx lambda = -1.0 / m22;
  return {-lambda * m12, lambda * m21, lambda * m11};
}

TetraPoint tetra_F(const TetraPoint& x) { return {x.x2, x.x1, x.x3}; }

TetraPoint tetra_apply_unchecked(const TetraAut& f, const TetraPoint& x) {
  TetraPoint y = x;
  for (auto it = f.word.rbegin(); it != f.word.rend(); ++it) {
    y = std::visit(
        [&](const auto& atom) -> TetraPoint {
          using T = std::decay_t<decltype(atom)>;
          if constexpr (std::is_same_v<T, TetraL>) return tetra_L(atom.nu, y);
          else if constexpr (std::is_same_v<T, TetraR>) return tetra_R(atom.chi, y);
          else return tetra_F(y);
        },
        *it);
  }
  return y;
}

TetraPoint tetra_apply(const TetraAut& f, const TetraPoint& x) {
  require_not_outside(tetra_membership(x), "point outside the tetrablock");
  return tetra_apply_unchecked(f, x);
}

TetraAut tetra_invert(const TetraAut& f) {
  TetraAut out;
  for (auto it = f.word.rbegin(); it != f.word.rend(); ++it) {
    out.word.push_back(std::visit(
        [](const auto& atom) -> TetraAtom {
          using T = std::decay_t<decltype(atom)>;
          if constexpr (std::is_same_v<T, TetraL>) return TetraL{atom.nu.inverse()};
          else if constexpr (std::is_same_v<T, TetraR>) return TetraR{atom.chi.inverse()};
          else return TetraF{};
        },
        *it));
  }
  return out;
}

TetraAut tetra_compose(const TetraAut& f, const TetraAut& g) {
  TetraAut out = f;
  out.word.insert(out.word.end(), g.word.begin(), g.word.end());
  return out;
}

MobiusTransform tetra_R_on_triangle(const MobiusTransform& chi) {
  const cplx sigma = chi.paper_omega(), beta = chi.paper_alpha();
  return {std::arg(-sigma), std::conj(sigma * beta)};
}

// ---------------------------------------------------------------------------

PentaPoint penta_apply_unchecked(const PentaAut& f, const PentaPoint& pt) {
  const cplx ca = std::conj(f.alpha());
  const cplx den = 1.0 - ca * pt.s + ca * ca * pt.p;
  if (std::abs(den) < 1e-14) throw Error(ErrorCode::DenominatorSingular, "pentablock denominator");
  const cplx a = f.omega * (1.0 - std::norm(f.alpha())) * pt.a / den;
  const cplx in[2] = {pt.s, pt.p};
  cplx out[2];
  gn_map(f.gamma, in, out);
  return {a, out[0], out[1]};
}

PentaPoint penta_apply(const PentaAut& f, const PentaPoint& pt) {
  if (orbit_margin(to_domain_point(pt)) < -kBoundaryTol)
    throw Error(ErrorCode::PointOutsideDomain, "point outside the pentablock");
  return penta_apply_unchecked(f, pt);
}

// ---------------------------------------------------------------------------

Domain domain_of(const Automorphism& f) {
  if (const auto* g = std::get_if<GnAut>(&f)) return g->n == 2 ? Domain::G2 : Domain::G3;
  if (std::holds_alternative<TetraAut>(f)) return Domain::Tetra;
  return Domain::Penta;
}

DomainPoint apply_unchecked(const Automorphism& f, const DomainPoint& pt) {
  DomainPoint out{pt.domain, {}};
  if (const auto* g = std::get_if<GnAut>(&f)) {
    gn_map(g->h, std::span<const cplx>(pt.z.data(), g->n), std::span<cplx>(out.z.data(), g->n));
  } else if (const auto* t = std::get_if<TetraAut>(&f)) {
    out = to_domain_point(tetra_apply_unchecked(*t, as_tetra(pt)));
  } else {
    out = to_domain_point(penta_apply_unchecked(std::get<PentaAut>(f), as_penta(pt)));
  }
  return out;
}

DomainPoint apply(const Automorphism& f, const DomainPoint& pt) {
  if (pt.domain != domain_of(f)) throw Error(ErrorCode::InvalidArgument, "domain mismatch");
  if (const auto* g = std::get_if<GnAut>(&f)) {
    if (g->n == 2) return to_domain_point(gn_apply(*g, as_sym2(pt)));
    return to_domain_point(gn_apply(*g, as_sym3(pt)));
  }
  if (const auto* t = std::get_if<TetraAut>(&f)) return to_domain_point(tetra_apply(*t, as_tetra(pt)));
  return to_domain_point(penta_apply(std::get<PentaAut>(f), as_penta(pt)));
}

Automorphism inverse(const Automorphism& f) {
  if (const auto* g = std::get_if<GnAut>(&f)) return g->inverse();
  if (const auto* t = std::get_if<TetraAut>(&f)) return tetra_invert(*t);
  return std::get<PentaAut>(f).inverse();
}

std::optional<int> periodicity_detect(const Automorphism& f, std::span<const DomainPoint> probes,
                                      const PeriodOptions& opts) {
  std::vector<DomainPoint> current(probes.begin(), probes.end());
  for (int p = 1; p <= opts.max_period; ++p) {
    double residual = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      current[i] = apply_unchecked(f, current[i]);
      residual = std::max(residual, max_dist(current[i], probes[i]));
    }
    if (residual < opts.tol) return p;
  }
  return std::nullopt;
}

}  // namespace mudomains
