#include "mudomains/domains.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <sstream>
#include <vector>

namespace mudomains {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::G2: return "g2";
    case Domain::G3: return "g3";
    case Domain::Tetra: return "tetra";
    case Domain::Penta: return "penta";
  }
  return "?";
}

std::optional<Domain> parse_domain(std::string_view name) {
  if (name == "g2") return Domain::G2;
  if (name == "g3") return Domain::G3;
  if (name == "tetra") return Domain::Tetra;
  if (name == "penta") return Domain::Penta;
  return std::nullopt;
}

int dimension(Domain d) { return d == Domain::G2 ? 2 : 3; }

DomainPoint to_domain_point(const SymPoint2& pt) { return {Domain::G2, {pt.s, pt.p, 0.0}}; }
DomainPoint to_domain_point(const SymPoint3& pt) { return {Domain::G3, {pt.s1, pt.s2, pt.s3}}; }
DomainPoint to_domain_point(const TetraPoint& pt) { return {Domain::Tetra, {pt.x1, pt.x2, pt.x3}}; }
DomainPoint to_domain_point(const PentaPoint& pt) { return {Domain::Penta, {pt.a, pt.s, pt.p}}; }
SymPoint2 as_sym2(const DomainPoint& pt) { return {pt.z[0], pt.z[1]}; }
SymPoint3 as_sym3(const DomainPoint& pt) { return {pt.z[0], pt.z[1], pt.z[2]}; }
TetraPoint as_tetra(const DomainPoint& pt) { return {pt.z[0], pt.z[1], pt.z[2]}; }
PentaPoint as_penta(const DomainPoint& pt) { return {pt.z[0], pt.z[1], pt.z[2]}; }

double max_dist(const DomainPoint& a, const DomainPoint& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a.z[i] - b.z[i]));
  return d;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Inside: return "Inside";
    case Status::Boundary: return "Boundary";
    case Status::Outside: return "Outside";
  }
  return "?";
}

MembershipVerdict verdict_from_margin(double margin, double boundary_tol) {
  MembershipVerdict v;
  v.margin = margin;
  if (std::abs(margin) <= boundary_tol)
    v.status = Status::Boundary;
  else
    v.status = margin > 0.0 ? Status::Inside : Status::Outside;
  return v;
}

SymPoint2 symmetrize2(cplx z1, cplx z2) { return {z1 + z2, z1 * z2}; }

SymPoint3 symmetrize3(cplx z1, cplx z2, cplx z3) {
  return {z1 + z2 + z3, z1 * z2 + z1 * z3 + z2 * z3, z1 * z2 * z3};
}

std::array<cplx, 2> desymmetrize2(const SymPoint2& pt) {
  const cplx c[3] = {1.0, -pt.s, pt.p};
  const auto r = poly_roots(c).roots;
  return {r[0], r[1]};
}

std::array<cplx, 3> desymmetrize3(const SymPoint3& pt) {
  const cplx c[4] = {1.0, -pt.s1, pt.s2, -pt.s3};
  const auto r = poly_roots(c).roots;
  return {r[0], r[1], r[2]};
}

// ---------------------------------------------------------------------------

cplx magic_phi(cplx omega, const SymPoint2& pt) {
  const cplx den = 2.0 - omega * pt.s;
  if (std::abs(den) <= 1e-14) throw Error(ErrorCode::Singular, "2 - omega s vanishes");
  return (2.0 * omega * pt.p - pt.s) / den;
}

cplx magic_phi_conj(cplx omega, const SymPoint2& pt) { return magic_phi(std::conj(omega), pt); }

namespace {

struct UnitGrid {
  int n = 0;
  std::vector<double> c, s;
};

const UnitGrid& unit_grid(int n) {
  static std::mutex mu;
  static std::deque<UnitGrid> cache;
  std::lock_guard lock(mu);
  for (const auto& g : cache)
    if (g.n == n) return g;
  UnitGrid g;
  g.n = n;
  g.c.resize(n);
  g.s.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    g.c[k] = std::cos(t);
    g.s[k] = std::sin(t);
  }
  cache.push_back(std::move(g));
  return cache.back();
}

// |Phi_omega|^2 with omega = (c, d); negative when singular.
inline double phi_norm2(double c, double d, const SymPoint2& pt) {
  const double sr = pt.s.real(), si = pt.s.imag(), pr = pt.p.real(), pi = pt.p.imag();
  // omega * s, omega * p
  const double osr = c * sr - d * si, osi = c * si + d * sr;
  const double opr = c * pr - d * pi, opi = c * pi + d * pr;
  const double nr = 2.0 * opr - sr, ni = 2.0 * opi - si;
  const double dr = 2.0 - osr, di = -osi;
  const double den = dr * dr + di * di;
  if (den <= 1e-28) return -1.0;
  return (nr * nr + ni * ni) / den;
}

inline double phi_norm2_at(double t, const SymPoint2& pt) {
  return phi_norm2(std::cos(t), std::sin(t), pt);
}

}  // namespace

MagicSup magic_sup(const SymPoint2& pt, const MagicSupOptions& opts) {
  const auto& grid = unit_grid(opts.grid_points);
  double best = -1.0;
  int best_k = 0;
  for (int k = 0; k < grid.n; ++k) {
    const double v = phi_norm2(grid.c[k], grid.s[k], pt);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  const double h = kTwoPi / grid.n;
  double lo = h * (best_k - 1), hi = h * (best_k + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = phi_norm2_at(x1, pt), f2 = phi_norm2_at(x2, pt);
  while (hi - lo > opts.refine_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = phi_norm2_at(x2, pt);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = phi_norm2_at(x1, pt);
    }
  }
  double t_best = h * best_k;
  for (double t : {x1, x2}) {
    const double v = phi_norm2_at(t, pt);
    if (v > best) {
      best = v;
      t_best = t;
    }
  }
  return {std::sqrt(std::max(best, 0.0)), std::polar(1.0, t_best)};
}

MembershipVerdict g2_membership(const SymPoint2& pt, const MagicSupOptions& opts,
                                double boundary_tol) {
  const double s_slack = 2.0 - std::abs(pt.s);
  if (s_slack <= 0.0) return verdict_from_margin(s_slack, boundary_tol);
  const auto sup = magic_sup(pt, opts);
  auto v = verdict_from_margin(std::min(s_slack, 1.0 - sup.value), boundary_tol);
  std::ostringstream os;
  os.precision(17);
  os << "omega=" << sup.argmax.real() << "," << sup.argmax.imag();
  v.witness = os.str();
  return v;
}

MembershipVerdict g2_membership_oracle(const SymPoint2& pt, double boundary_tol) {
  const auto r = desymmetrize2(pt);
  return verdict_from_margin(1.0 - std::max(std::abs(r[0]), std::abs(r[1])), boundary_tol);
}

MembershipVerdict g3_membership(const SymPoint3& pt, double boundary_tol) {
  const auto r = desymmetrize3(pt);
  double m = 0.0;
  for (const cplx& z : r) m = std::max(m, std::abs(z));
  return verdict_from_margin(1.0 - m, boundary_tol);
}

MembershipVerdict tetra_membership(const TetraPoint& x, double boundary_tol) {
  const double margin = (1.0 - std::norm(x.x1)) - std::abs(x.x2 - std::conj(x.x1) * x.x3) -
                        std::abs(x.x1 * x.x2 - x.x3);
  return verdict_from_margin(margin, boundary_tol);
}

std::string_view to_string(BetaVariant v) {
  return v == BetaVariant::Paper ? "paper" : "literature";
}

std::optional<BetaVariant> parse_beta_variant(std::string_view name) {
  if (name == "paper") return BetaVariant::Paper;
  if (name == "literature") return BetaVariant::Literature;
  return std::nullopt;
}

cplx penta_beta(cplx s, cplx p, BetaVariant variant) {
  const double ap = std::abs(p);
  const double den = variant == BetaVariant::Paper ? (1.0 - ap) * (1.0 - ap) : 1.0 - ap * ap;
  if (den <= 0.0) throw Error(ErrorCode::Singular, "|p| >= 1 in the pentablock beta");
  return (s - std::conj(s) * p) / den;
}

double penta_bound(cplx s, cplx p, BetaVariant variant) {
  const cplx beta = penta_beta(s, p, variant);
  const double nb = std::abs(beta);
  if (nb > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "|beta| = " << nb << " exceeds 1 with the " << to_string(variant) << " denominator";
    throw Error(ErrorCode::BetaOutOfRange, os.str());
  }
  const double root = std::sqrt(std::max(0.0, 1.0 - nb * nb));
  return std::abs(1.0 - 0.5 * s * std::conj(beta) / (1.0 + root));
}

MembershipVerdict penta_membership(const PentaPoint& pt, BetaVariant variant,
                                   double boundary_tol) {
  const auto base = g2_membership_oracle({pt.s, pt.p}, boundary_tol);
  if (base.status != Status::Inside) return base;
  const double slack = penta_bound(pt.s, pt.p, variant) - std::abs(pt.a);
  return verdict_from_margin(std::min(base.margin, slack), boundary_tol);
}

bool royal_membership(const SymPoint2& pt) {
  return std::abs(pt.s * pt.s - 4.0 * pt.p) < 1e-10 &&
         g2_membership_oracle(pt).status == Status::Inside;
}

bool triangular_membership(const TetraPoint& pt) {
  return std::abs(pt.x3 - pt.x1 * pt.x2) < 1e-10 &&
         tetra_membership(pt).status == Status::Inside;
}

SymPoint2 geodesic_form1(const BlaschkeProduct& b, cplx lambda) {
  if (!(std::abs(lambda) < 1.0))
    throw Error(ErrorCode::GeodesicArgOutOfDisc, "geodesic parameter outside the disc");
  const cplx r = std::sqrt(lambda);
  return symmetrize2(b(r), b(-r));
}

SymPoint2 geodesic_form2(const MobiusTransform& a, cplx lambda) {
  if (!(std::abs(lambda) < 1.0))
    throw Error(ErrorCode::GeodesicArgOutOfDisc, "geodesic parameter outside the disc");
  const auto kind = mobius_classify(a).kind;
  if (kind == MobiusKind::Elliptic || kind == MobiusKind::Identity)
    throw Error(ErrorCode::NotFixedPointFree, "form-2 geodesics need a fixed-point-free automorphism");
  return symmetrize2(lambda, a(lambda));
}

SymPoint2 boundary_param_royal(double theta) {
  const cplx w = std::polar(1.0, theta);
  return {2.0 * w, w * w};
}

double distance_to_royal_circle(const SymPoint2& pt) {
  auto dist = [&](double t) {
    const auto r = boundary_param_royal(t);
    return std::max(std::abs(pt.s - r.s), std::abs(pt.p - r.p));
  };
  const double t0 = std::arg(pt.s);
  double lo = t0 - 0.1, hi = t0 + 0.1;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-13) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (dist(a) < dist(b))
      hi = b;
    else
      lo = a;
  }
  return std::min({dist(t0), dist(0.5 * (lo + hi)), dist(std::arg(pt.p) / 2.0),
                   dist(std::arg(pt.p) / 2.0 + kPi)});
}

// ---------------------------------------------------------------------------

double orbit_margin(const DomainPoint& pt) {
  switch (pt.domain) {
    case Domain::G2:
      return g2_membership_oracle(as_sym2(pt)).margin;
    case Domain::G3:
      return g3_membership(as_sym3(pt)).margin;
    case Domain::Tetra:
      return tetra_membership(as_tetra(pt)).margin;
    case Domain::Penta: {
      const auto base = g2_membership_oracle({pt.z[1], pt.z[2]});
      if (base.margin <= 0.0 || std::abs(pt.z[2]) >= 1.0) return base.margin;
      double bound = 0.0;
      try {
        bound = penta_bound(pt.z[1], pt.z[2], BetaVariant::Literature);
      } catch (const Error&) {
        // |beta| rounds above 1 only within rounding distance of the G2 boundary.
        return std::min(base.margin, 0.0);
      }
      return std::min(base.margin, bound - std::abs(pt.z[0]));
    }
  }
  return 0.0;
}

MembershipVerdict membership(const DomainPoint& pt, BetaVariant variant) {
  switch (pt.domain) {
    case Domain::G2: return g2_membership(as_sym2(pt));
    case Domain::G3: return g3_membership(as_sym3(pt));
    case Domain::Tetra: return tetra_membership(as_tetra(pt));
    case Domain::Penta: return penta_membership(as_penta(pt), variant);
  }
  return {};
}

}  // namespace mudomains
