#include "mudomains/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>

#include "mudomains/sampling.hpp"

namespace mudomains {

namespace {

struct TolField {
  const char* name;
  double Tolerances::*member;
};

constexpr TolField kTolFields[] = {
    {"stop_displacement", &Tolerances::stop_displacement},
    {"stop_margin", &Tolerances::stop_margin},
    {"fixed_displacement", &Tolerances::fixed_displacement},
    {"fixed_margin", &Tolerances::fixed_margin},
    {"fixed_residual", &Tolerances::fixed_residual},
    {"newton_residual", &Tolerances::newton_residual},
    {"newton_step", &Tolerances::newton_step},
    {"newton_rank", &Tolerances::newton_rank},
    {"periodic_return", &Tolerances::periodic_return},
    {"periodic_spread", &Tolerances::periodic_spread},
    {"boundary", &Tolerances::boundary},
    {"monotone_slack", &Tolerances::monotone_slack},
    {"monotone_slack_g3", &Tolerances::monotone_slack_g3},
    {"target_margin", &Tolerances::target_margin},
    {"cluster_eps", &Tolerances::cluster_eps},
    {"unimodular", &Tolerances::unimodular},
    {"angle", &Tolerances::angle},
    {"atom_range", &Tolerances::atom_range},
    {"retraction", &Tolerances::retraction},
    {"sample_residual", &Tolerances::sample_residual},
    {"curve", &Tolerances::curve},
};

constexpr int kValidationSamples = 1000;
constexpr double kValidationRadius = 0.999;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSelfMap, what); }

bool outbound_allowed(Domain d, OutboundKind k) {
  switch (k) {
    case OutboundKind::HalfS:
    case OutboundKind::P:
    case OutboundKind::Phi: return d == Domain::G2 || d == Domain::Penta;
    case OutboundKind::ThirdS1:
    case OutboundKind::S3: return d == Domain::G3;
    case OutboundKind::X1:
    case OutboundKind::X2:
    case OutboundKind::X3: return d == Domain::Tetra;
    case OutboundKind::PentaA: return d == Domain::Penta;
  }
  return false;
}

bool inbound_allowed(Domain d, InboundKind k) {
  switch (k) {
    case InboundKind::Form1:
    case InboundKind::Form2:
    case InboundKind::PairWith:
    case InboundKind::AxisP: return d == Domain::G2;
    case InboundKind::TripleWith:
    case InboundKind::AxisS3: return d == Domain::G3;
    case InboundKind::Triangular:
    case InboundKind::Axis1:
    case InboundKind::Axis2:
    case InboundKind::Axis3: return d == Domain::Tetra;
    case InboundKind::PentaBase:
    case InboundKind::PentaAxisA: return d == Domain::Penta;
  }
  return false;
}

using Mat3 = std::array<std::array<cplx, 3>, 3>;

cplx det(const Mat3& m, int n) {
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Image of the symmetric coordinates under z -> omega z (z - a) / (1 - conj(a) z)
// without extracting roots: prod_i ((1 - conj(a) z_i) w - omega z_i (z_i - a))
// equals det(h_w(C)) for the companion matrix C, and is interpolated in w on
// the roots of unity.
void blaschke2_on_sym(const BlaschkeProduct& b, cplx* sym, int n) {
  const cplx omega = b.omega(), a = b.zeros()[1], ca = std::conj(a);
  Mat3 c{}, c2{};
  for (int i = 1; i < n; ++i) c[i][i - 1] = 1.0;
  for (int k = 1; k <= n; ++k) c[n - k][n - 1] = -((k % 2) ? -1.0 : 1.0) * sym[k - 1];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) c2[i][j] += c[i][l] * c[l][j];
  const int nodes = n + 1;
  std::array<cplx, 4> q{};
  for (int j = 0; j < nodes; ++j) {
    const cplx w = std::polar(1.0, kTwoPi * j / nodes);
    Mat3 h{};
    for (int r = 0; r < n; ++r)
      for (int col = 0; col < n; ++col)
        h[r][col] = w * ((r == col ? 1.0 : 0.0) - ca * c[r][col]) - omega * (c2[r][col] - a * c[r][col]);
    const cplx d = det(h, n);
    for (int m = 0; m <= n; ++m) q[m] += d * std::conj(std::pow(w, m)) / static_cast<double>(nodes);
  }
  if (std::abs(q[n]) < 1e-300) throw Error(ErrorCode::DenominatorSingular, "Blaschke image degenerates");
  for (int k = 1; k <= n; ++k) sym[k - 1] = ((k % 2) ? -1.0 : 1.0) * q[n - k] / q[n];
}

// pi_n(z) -> pi_n(g(z_1), ..., g(z_n)) evaluated atom by atom on the
// symmetric coordinates.
DomainPoint sym_lift(const DiscWord& g, const DomainPoint& pt) {
  const int n = pt.dim();
  DomainPoint out = pt;
  cplx* sym = out.z.data();
  for (const auto& atom : g.atoms) {
    if (const auto* m = std::get_if<MobiusTransform>(&atom)) {
      std::array<cplx, 3> in = out.z;
      gn_map(*m, std::span<const cplx>(in.data(), n), std::span<cplx>(sym, n));
    } else if (const auto* sc = std::get_if<DiscScale>(&atom)) {
      cplx f = 1.0;
      for (int k = 0; k < n; ++k) sym[k] *= (f *= sc->factor);
    } else {
      const auto& b = std::get<BlaschkeProduct>(atom);
      if (b.degree() == 1) {
        cplx f = 1.0;
        for (int k = 0; k < n; ++k) sym[k] *= (f *= b.omega());
      } else {
        blaschke2_on_sym(b, sym, n);
      }
    }
  }
  return out;
}

DomainPoint apply_atom(Domain domain, const MapAtom& atom, const DomainPoint& z) {
  return std::visit(
      [&](const auto& a) -> DomainPoint {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Automorphism>) return apply_unchecked(a, z);
        else if constexpr (std::is_same_v<T, SymLift>) return sym_lift(a.g, z);
        else if constexpr (std::is_same_v<T, DiscRoute>) return inbound_apply(domain, a.in, a.g(outbound_apply(a.out, z)));
        else return a.value;
      },
      atom);
}

void validate_atom(Domain domain, const MapAtom& atom, std::size_t index) {
  const std::string where = "atom " + std::to_string(index) + ": ";
  Rng rng(0x5eed0000ULL + index);
  auto check_word = [&](const DiscWord& g) {
    for (int i = 0; i < kValidationSamples; ++i) {
      const cplx z = sample_disc(rng, kValidationRadius);
      if (!(std::abs(g(z)) < 1.0)) invalid(where + "disc word leaves the disc");
    }
  };
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Automorphism>) {
          if (domain_of(a) != domain) invalid(where + "automorphism of another domain");
        } else if constexpr (std::is_same_v<T, SymLift>) {
          if (domain != Domain::G2 && domain != Domain::G3) invalid(where + "symmetric lifts need G2 or G3");
          check_word(a.g);
        } else if constexpr (std::is_same_v<T, DiscRoute>) {
          if (!outbound_allowed(domain, a.out.kind)) invalid(where + "outbound functional not defined here");
          if (!inbound_allowed(domain, a.in.kind)) invalid(where + "inbound embedding not defined here");
          if (a.in.kind == InboundKind::Form2) {
            const auto kind = mobius_classify(a.in.mobius).kind;
            if (kind == MobiusKind::Elliptic || kind == MobiusKind::Identity)
              invalid(where + "form-2 geodesic needs a fixed-point-free automorphism");
          }
          if (a.in.kind == InboundKind::Triangular || a.in.kind == InboundKind::PairWith ||
              a.in.kind == InboundKind::PentaBase || a.in.kind == InboundKind::TripleWith) {
            if (!(std::abs(a.in.c1) < 1.0)) invalid(where + "embedding constant outside the disc");
            if (a.in.kind == InboundKind::TripleWith && !(std::abs(a.in.c2) < 1.0))
              invalid(where + "embedding constant outside the disc");
          }
          if (a.out.kind == OutboundKind::Phi && std::abs(std::abs(a.out.omega) - 1.0) > 1e-12)
            invalid(where + "Phi needs a unimodular omega");
          check_word(a.g);
          for (int i = 0; i < kValidationSamples; ++i) {
            const DomainPoint x = sample_interior(domain, rng, kValidationRadius);
            if (!(std::abs(outbound_apply(a.out, x)) < 1.0)) invalid(where + "outbound functional leaves the disc");
            const cplx l = sample_disc(rng, kValidationRadius);
            if (!(orbit_margin(inbound_apply(domain, a.in, l)) > 0.0)) invalid(where + "inbound embedding leaves the domain");
          }
        } else {
          if (a.value.domain != domain) invalid(where + "constant in another domain");
          if (!(orbit_margin(a.value) > 0.0)) invalid(where + "constant outside the domain");
        }
      },
      atom);
}

double max_norm(const DomainPoint& a) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.z[i]));
  return m;
}

DomainPoint residual_vector(const SelfMap& f, const DomainPoint& z) {
  DomainPoint r = evaluate(f, z);
  for (int i = 0; i < z.dim(); ++i) r.z[i] -= z.z[i];
  return r;
}

double safe_margin(const DomainPoint& z) {
  try {
    return orbit_margin(z);
  } catch (const Error&) {
    return -1.0;
  }
}

// Greedy max-norm clustering; each cluster keeps its seed and its
// lowest-margin member.
struct Cluster {
  DomainPoint seed;
  DomainPoint best;
  double best_margin;
  int count;
};

std::vector<Cluster> cluster_points(const OrbitRecord& rec, std::size_t first, double margin_cut, double eps) {
  std::vector<Cluster> out;
  for (std::size_t k = first; k < rec.points.size(); ++k) {
    if (!(rec.margins[k] < margin_cut)) continue;
    const auto& x = rec.points[k];
    auto it = std::find_if(out.begin(), out.end(), [&](const Cluster& c) { return max_dist(c.seed, x) < eps; });
    if (it == out.end()) {
      out.push_back({x, x, rec.margins[k], 1});
    } else {
      ++it->count;
      if (rec.margins[k] < it->best_margin) {
        it->best = x;
        it->best_margin = rec.margins[k];
      }
    }
  }
  return out;
}

// Moving-average monotonicity of m[first..]: window 10 on long tails, a
// third of the tail on short ones (fast orbits reach the boundary in a few
// dozen steps).
bool monotone_tail(const std::vector<double>& m, std::size_t first, double slack) {
  const std::size_t len = m.size() - first;
  const std::size_t w = len >= 20 ? 10 : std::max<std::size_t>(2, len / 3);
  if (len < w) return true;
  double prev = 0.0;
  for (std::size_t k = first; k + w <= m.size(); ++k) {
    double avg = 0.0;
    for (std::size_t j = k; j < k + w; ++j) avg += m[j];
    avg /= static_cast<double>(w);
    if (k > first && avg > prev + slack) return false;
    prev = avg;
  }
  return true;
}

}  // namespace

std::vector<std::pair<std::string, double>> tolerance_fields(const Tolerances& tol) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& f : kTolFields) out.emplace_back(f.name, tol.*(f.member));
  return out;
}

bool set_tolerance(Tolerances& tol, std::string_view name, double value) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (const auto& f : kTolFields) {
    if (key == f.name) {
      tol.*(f.member) = value;
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

cplx outbound_apply(const Outbound& out, const DomainPoint& pt) {
  const bool penta = pt.domain == Domain::Penta;
  switch (out.kind) {
    case OutboundKind::HalfS: return 0.5 * pt.z[penta ? 1 : 0];
    case OutboundKind::P: return pt.z[penta ? 2 : 1];
    case OutboundKind::Phi: return magic_phi(out.omega, {pt.z[penta ? 1 : 0], pt.z[penta ? 2 : 1]});
    case OutboundKind::ThirdS1: return pt.z[0] / 3.0;
    case OutboundKind::S3: return pt.z[2];
    case OutboundKind::X1: return pt.z[0];
    case OutboundKind::X2: return pt.z[1];
    case OutboundKind::X3: return pt.z[2];
    case OutboundKind::PentaA: return pt.z[0];
  }
  return 0.0;
}

DomainPoint inbound_apply(Domain domain, const Inbound& in, cplx l) {
  switch (in.kind) {
    case InboundKind::Form1: {
      const cplx r = std::sqrt(l);
      return to_domain_point(symmetrize2(in.blaschke(r), in.blaschke(-r)));
    }
    case InboundKind::Form2: return to_domain_point(symmetrize2(l, in.mobius(l)));
    case InboundKind::PairWith: return to_domain_point(symmetrize2(l, in.c1));
    case InboundKind::AxisP: return to_domain_point(SymPoint2{0.0, l});
    case InboundKind::TripleWith: return to_domain_point(symmetrize3(l, in.c1, in.c2));
    case InboundKind::AxisS3: return to_domain_point(SymPoint3{0.0, 0.0, l});
    case InboundKind::Triangular: return to_domain_point(TetraPoint{l, in.c1, l * in.c1});
    case InboundKind::Axis1: return to_domain_point(TetraPoint{l, 0.0, 0.0});
    case InboundKind::Axis2: return to_domain_point(TetraPoint{0.0, l, 0.0});
    case InboundKind::Axis3: return to_domain_point(TetraPoint{0.0, 0.0, l});
    case InboundKind::PentaBase: return to_domain_point(PentaPoint{0.0, l + in.c1, l * in.c1});
    case InboundKind::PentaAxisA: return to_domain_point(PentaPoint{l, 0.0, 0.0});
  }
  return DomainPoint{domain, {}};
}

SelfMap make_self_map(Domain domain, std::vector<MapAtom> atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i) validate_atom(domain, atoms[i], i);
  return {domain, std::move(atoms)};
}

SelfMap identity_map(Domain domain) { return {domain, {}}; }

DomainPoint evaluate(const SelfMap& f, const DomainPoint& z) {
  DomainPoint y = z;
  for (const auto& atom : f.atoms) y = apply_atom(f.domain, atom, y);
  return y;
}

DomainPoint self_map_apply(const SelfMap& f, const DomainPoint& z, const Tolerances& tol) {
  if (z.domain != f.domain) throw Error(ErrorCode::InvalidArgument, "domain mismatch");
  if (orbit_margin(z) < -tol.atom_range) throw Error(ErrorCode::PointOutsideDomain, "start point outside the domain");
  DomainPoint y = z;
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    y = apply_atom(f.domain, f.atoms[i], y);
    if (!(orbit_margin(y) >= -tol.atom_range))
      throw Error(ErrorCode::AtomRangeViolation, "atom " + std::to_string(i) + " left the domain");
  }
  return y;
}

bool is_automorphism(const SelfMap& f) {
  return std::all_of(f.atoms.begin(), f.atoms.end(),
                     [](const MapAtom& a) { return std::holds_alternative<Automorphism>(a); });
}

std::optional<Automorphism> single_automorphism(const SelfMap& f) {
  if (f.atoms.size() != 1) return std::nullopt;
  if (const auto* a = std::get_if<Automorphism>(&f.atoms[0])) return *a;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string_view to_string(OrbitRecord::Stop s) {
  switch (s) {
    case OrbitRecord::Stop::MaxSteps: return "max_steps";
    case OrbitRecord::Stop::Converged: return "converged";
    case OrbitRecord::Stop::Boundary: return "boundary";
  }
  return "?";
}

std::string_view to_string(VerdictTag t) {
  switch (t) {
    case VerdictTag::ConvergedFixedPoint: return "ConvergedFixedPoint";
    case VerdictTag::Periodic: return "Periodic";
    case VerdictTag::BoundaryDivergent: return "BoundaryDivergent";
    case VerdictTag::BoundedWithFixedPoint: return "BoundedWithFixedPoint";
    case VerdictTag::Undecided: return "Undecided";
  }
  return "?";
}

std::string_view to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::Diverged: return "diverged";
    case NewtonStatus::Singular: return "singular";
    case NewtonStatus::StepOutOfDomain: return "step_out_of_domain";
    case NewtonStatus::EvaluationFailed: return "evaluation_failed";
  }
  return "?";
}

std::string_view to_string(TargetClass c) {
  switch (c) {
    case TargetClass::RoyalCircle: return "RoyalCircle";
    case TargetClass::MixedFace: return "MixedFace";
    case TargetClass::Other: return "Other";
  }
  return "?";
}

OrbitRecord iterate(const SelfMap& f, const DomainPoint& z0, const Tolerances& tol) {
  if (tol.n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
  OrbitRecord rec;
  rec.start = z0;
  rec.points.push_back(z0);
  rec.margins.push_back(orbit_margin(z0));
  if (rec.margins.back() < -tol.atom_range) throw Error(ErrorCode::PointOutsideDomain, "start point outside the domain");
  if (rec.margins.back() < tol.stop_margin) {
    rec.stop = OrbitRecord::Stop::Boundary;
    return rec;
  }
  rec.points.reserve(std::min(tol.n_max, 1 << 14) + 1);
  for (int k = 1; k <= tol.n_max; ++k) {
    DomainPoint next;
    try {
      next = self_map_apply(f, rec.points.back(), tol);
    } catch (const Error& e) {
      // Within the boundary layer an atom image can land past the root-margin
      // noise floor; the orbit has reached the boundary.
      if (e.code() != ErrorCode::AtomRangeViolation || rec.margins.back() >= tol.boundary) throw;
      rec.stop = OrbitRecord::Stop::Boundary;
      break;
    }
    const double disp = max_dist(next, rec.points.back());
    rec.points.push_back(next);
    rec.margins.push_back(orbit_margin(next));
    rec.displacements.push_back(disp);
    if (disp < tol.stop_displacement) {
      rec.stop = OrbitRecord::Stop::Converged;
      break;
    }
    if (rec.margins.back() < tol.stop_margin) {
      rec.stop = OrbitRecord::Stop::Boundary;
      break;
    }
  }
  return rec;
}

OrbitVerdict classify_orbit(const OrbitRecord& rec, const SelfMap& f, const Tolerances& tol) {
  OrbitVerdict v;
  const std::size_t n = rec.points.size() - 1;
  const DomainPoint& last = rec.points.back();
  v.final_margin = rec.margins.back();
  v.final_displacement = rec.displacements.empty() ? 0.0 : rec.displacements.back();

  // (1) converged
  if (v.final_displacement < tol.fixed_displacement && v.final_margin > tol.fixed_margin) {
    std::optional<DomainPoint> star;
    const auto polish = newton_solve(f, last, 5, tol);
    if (polish.ok() && max_dist(polish.point, last) < 1e-8) star = polish.point;
    else if (fixed_residual(f, last) < tol.fixed_residual) star = last;
    if (star && fixed_residual(f, *star) < tol.fixed_residual) {
      v.tag = VerdictTag::ConvergedFixedPoint;
      v.fixed_point = star;
      return v;
    }
  }

  // (2) periodic
  if (v.final_margin > tol.stop_margin) {
    for (int p = 2; p <= 64; ++p) {
      const std::size_t up = static_cast<std::size_t>(p);
      if (n < 3 * up) break;
      bool returns = true;
      for (std::size_t j = 0; j < 3 && returns; ++j)
        returns = max_dist(rec.points[n - j * up], rec.points[n - (j + 1) * up]) < tol.periodic_return;
      if (!returns) continue;
      double spread = 0.0;
      for (std::size_t i = 1; i < up; ++i) spread = std::max(spread, max_dist(rec.points[n - i], last));
      if (spread <= tol.periodic_spread) continue;
      v.tag = VerdictTag::Periodic;
      v.period = p;
      v.cycle.assign(rec.points.end() - p, rec.points.end());
      return v;
    }
  }

  // (3) boundary divergent
  {
    bool divergent = false;
    constexpr std::size_t window = 50;
    const double slack = f.domain == Domain::G3 ? tol.monotone_slack_g3 : tol.monotone_slack;
    if (rec.margins.size() >= window) {
      const std::size_t first = rec.margins.size() - window;
      divergent = std::all_of(rec.margins.begin() + first, rec.margins.end(),
                              [&](double m) { return m < tol.boundary; }) &&
                  monotone_tail(rec.margins, first, slack);
    }
    if (!divergent && rec.stop == OrbitRecord::Stop::Boundary) {
      std::size_t first = rec.margins.size();
      while (first > 0 && rec.margins[first - 1] < tol.boundary) --first;
      divergent = rec.margins.size() - first >= 2 && monotone_tail(rec.margins, first, slack);
      // Orbits that jump to the boundary in a handful of steps: every margin
      // must have decreased on the way down.
      if (!divergent && rec.margins.size() >= 3) {
        divergent = true;
        for (std::size_t k = 1; k < rec.margins.size() && divergent; ++k)
          divergent = rec.margins[k] < rec.margins[k - 1] + slack;
      }
    }
    // A compact orbit can graze the boundary and come back. An orbit that
    // already went about as deep as it ends up and then climbed out of the
    // boundary layer is recurrent, not diverging.
    if (divergent) {
      const double depth = std::min(tol.boundary, 10.0 * rec.margins.back());
      bool dipped = false;
      for (double m : rec.margins) {
        if (m < depth) dipped = true;
        else if (dipped && m > 10.0 * tol.boundary) {
          divergent = false;
          break;
        }
      }
    }
    if (divergent) {
      v.tag = VerdictTag::BoundaryDivergent;
      for (const auto& c : cluster_points(rec, rec.points.size() / 2, tol.target_margin, tol.cluster_eps))
        v.tail_clusters.push_back(c.best);
      return v;
    }
  }

  // (4) bounded orbit with an interior fixed point
  {
    auto mean_of = [&](std::size_t from) {
      DomainPoint mean{last.domain, {}};
      const double count = static_cast<double>(rec.points.size() - from);
      for (std::size_t k = from; k < rec.points.size(); ++k)
        for (int i = 0; i < mean.dim(); ++i) mean.z[i] += rec.points[k].z[i] / count;
      return mean;
    };
    std::vector<DomainPoint> starts{last, mean_of(rec.points.size() - std::min<std::size_t>(100, n + 1)), mean_of(0)};
    for (std::size_t j = 0; j < 16; ++j) starts.push_back(rec.points[j * n / 16]);
    // The orbit mean may sit slightly outside the domain; Newton still
    // converges from there and only the result has to be inside.
    for (const auto& s : starts) {
      const auto res = newton_solve(f, s, 50, tol);
      const bool located = res.ok() || (res.status != NewtonStatus::EvaluationFailed && res.residual < tol.fixed_residual);
      if (located && safe_margin(res.point) > tol.fixed_margin) {
        v.tag = VerdictTag::BoundedWithFixedPoint;
        v.fixed_point = res.point;
        return v;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

double fixed_residual(const SelfMap& f, const DomainPoint& z) { return max_dist(evaluate(f, z), z); }

NewtonResult newton_solve(const SelfMap& f, const DomainPoint& start, int max_iter, const Tolerances& tol) {
  NewtonResult out;
  out.point = start;
  const int d = start.dim();
  try {
    DomainPoint z = start;
    DomainPoint F = residual_vector(f, z);
    double r = max_norm(F);
    for (int it = 0;; ++it) {
      out.point = z;
      out.residual = r;
      out.iterations = it;
      if (r < tol.newton_residual) {
        out.status = safe_margin(z) > 0.0 ? NewtonStatus::Converged : NewtonStatus::StepOutOfDomain;
        return out;
      }
      if (it >= max_iter) {
        out.status = NewtonStatus::Diverged;
        return out;
      }
      Eigen::MatrixXcd J(d, d);
      Eigen::VectorXcd rhs(d);
      for (int j = 0; j < d; ++j) {
        DomainPoint zp = z, zm = z;
        zp.z[j] += tol.newton_step;
        zm.z[j] -= tol.newton_step;
        const DomainPoint fp = residual_vector(f, zp), fm = residual_vector(f, zm);
        for (int i = 0; i < d; ++i) J(i, j) = (fp.z[i] - fm.z[i]) / (2.0 * tol.newton_step);
        rhs(j) = -F.z[j];
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (!(sv(0) > 1e-14)) {
        out.status = NewtonStatus::Singular;
        return out;
      }
      Eigen::VectorXcd coeff = svd.matrixU().adjoint() * rhs;
      for (int i = 0; i < d; ++i) coeff(i) = sv(i) > tol.newton_rank * sv(0) ? coeff(i) / sv(i) : 0.0;
      const Eigen::VectorXcd step = svd.matrixV() * coeff;

      // Steps may approach the boundary only geometrically; otherwise the
      // residual line search slides into boundary minima of |f(z) - z|.
      const double floor_margin = std::max(0.0, 0.5 * safe_margin(z));
      double t = 1.0;
      bool accepted = false, left_domain = false;
      for (int h = 0; h <= 30; ++h, t *= 0.5) {
        DomainPoint trial = z;
        for (int i = 0; i < d; ++i) trial.z[i] += t * step(i);
        if (!(safe_margin(trial) > floor_margin)) {
          left_domain = true;
          continue;
        }
        const DomainPoint Ft = residual_vector(f, trial);
        const double rt = max_norm(Ft);
        if (rt < r) {
          z = trial;
          F = Ft;
          r = rt;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        out.status = left_domain ? NewtonStatus::StepOutOfDomain : NewtonStatus::Diverged;
        return out;
      }
    }
  } catch (const Error&) {
    out.status = NewtonStatus::EvaluationFailed;
    return out;
  }
}

std::optional<DomainPoint> newton_fixed_point(const SelfMap& f, const DomainPoint& start, int max_iter,
                                              const Tolerances& tol) {
  const auto res = newton_solve(f, start, max_iter, tol);
  if (res.ok()) return res.point;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

TargetSetEstimate target_set_from_orbit(const OrbitRecord& rec, int burn_in, const Tolerances& tol) {
  if (rec.start.domain != Domain::G2) throw Error(ErrorCode::InvalidArgument, "target sets are estimated on G2 only");
  TargetSetEstimate est;
  const auto clusters = cluster_points(rec, static_cast<std::size_t>(std::max(burn_in, 0)), tol.target_margin,
                                       tol.cluster_eps);
  for (const auto& c : clusters) {
    TargetCluster tc;
    tc.representative = as_sym2(c.best);
    tc.multiplicity = c.count;
    tc.factors = desymmetrize2(tc.representative);
    tc.margin = c.best_margin;
    est.clusters.push_back(tc);
  }
  if (est.clusters.empty()) return est;

  auto unimodular = [&](cplx z) { return std::abs(std::abs(z) - 1.0) < tol.unimodular; };
  bool royal = true, mixed = true;
  std::vector<double> royal_thetas, mixed_thetas;
  std::vector<int> which;
  for (const auto& c : est.clusters) {
    const bool u0 = unimodular(c.factors[0]), u1 = unimodular(c.factors[1]);
    const bool coincide = std::abs(c.factors[0] - c.factors[1]) < tol.unimodular;
    if (u0 && u1 && coincide) royal_thetas.push_back(wrap_angle(std::arg(c.factors[0] + c.factors[1])));
    else royal = false;
    if (u0 != u1) {
      const int k = u0 ? 0 : 1;
      which.push_back(k);
      mixed_thetas.push_back(wrap_angle(std::arg(c.factors[k])));
    } else {
      mixed = false;
    }
  }
  if (royal) {
    est.classification = TargetClass::RoyalCircle;
    est.thetas = royal_thetas;
    return est;
  }
  if (mixed) {
    const double t0 = mixed_thetas.front();
    mixed = std::all_of(mixed_thetas.begin(), mixed_thetas.end(),
                        [&](double t) { return std::abs(angle_diff(t, t0)) < tol.angle; });
    if (mixed) {
      est.classification = TargetClass::MixedFace;
      est.thetas = {t0};
      est.unimodular_factor = which;
    }
  }
  return est;
}

TargetSetEstimate target_set_estimate(const SelfMap& f, const DomainPoint& z0, int burn_in, const Tolerances& tol) {
  if (f.domain != Domain::G2) throw Error(ErrorCode::InvalidArgument, "target sets are estimated on G2 only");
  const auto rec = iterate(f, z0, tol);
  const auto verdict = classify_orbit(rec, f, tol);
  if (verdict.tag != VerdictTag::BoundaryDivergent)
    throw Error(ErrorCode::NotDivergent, std::string("orbit verdict is ") + std::string(to_string(verdict.tag)));
  if (burn_in < 0) burn_in = static_cast<int>(rec.points.size() / 2);
  return target_set_from_orbit(rec, burn_in, tol);
}

}  // namespace mudomains
