#include "mudomains/theorem_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace mudomains {

namespace {

constexpr std::uint64_t kStartStream = 0x57a27ULL;

bool non_divergent_kind(MobiusKind k) { return k == MobiusKind::Identity || k == MobiusKind::Elliptic; }

cplx random_unimodular(Rng& rng) { return std::polar(1.0, rng.uniform(0.0, kTwoPi)); }

// Non-automorphic disc word: Mobius, then a scale or a degree-2 Blaschke
// product, sometimes followed by another Mobius map.
DiscWord contracting_word(Rng& rng) {
  DiscWord g;
  g.atoms.push_back(sample_mobius(rng));
  if (rng.coin()) g.atoms.push_back(DiscScale{std::polar(rng.uniform(0.3, 0.9), rng.uniform(0.0, kTwoPi))});
  else g.atoms.push_back(BlaschkeProduct(random_unimodular(rng), sample_disc(rng, 0.9)));
  if (rng.coin()) g.atoms.push_back(sample_mobius(rng));
  return g;
}

DiscWord route_word(Rng& rng) {
  if (rng.coin(1.0 / 3.0)) return DiscWord{{sample_mobius(rng)}};
  return contracting_word(rng);
}

MobiusTransform sample_fixed_point_free(Rng& rng) {
  for (;;) {
    const auto m = sample_mobius(rng);
    if (!non_divergent_kind(mobius_classify(m).kind)) return m;
  }
}

Automorphism random_automorphism(Domain d, Rng& rng) {
  switch (d) {
    case Domain::G2: return GnAut{2, sample_mobius(rng)};
    case Domain::G3: return GnAut{3, sample_mobius(rng)};
    case Domain::Tetra: {
      TetraAut t;
      t.word.push_back(TetraL{sample_mobius(rng)});
      t.word.push_back(TetraR{sample_mobius(rng)});
      if (rng.coin()) t.word.push_back(TetraF{});
      return t;
    }
    case Domain::Penta: return PentaAut{random_unimodular(rng), sample_mobius(rng)};
  }
  return GnAut{};
}

DiscRoute random_route(Domain d, Rng& rng) {
  DiscRoute r;
  r.g = route_word(rng);
  auto pick_out = [&](std::initializer_list<OutboundKind> ks) {
    const int i = rng.uniform_int(0, static_cast<int>(ks.size()) - 1);
    r.out.kind = *(ks.begin() + i);
    r.out.omega = random_unimodular(rng);
  };
  auto pick_in = [&](std::initializer_list<InboundKind> ks) {
    const int i = rng.uniform_int(0, static_cast<int>(ks.size()) - 1);
    r.in.kind = *(ks.begin() + i);
    r.in.c1 = sample_disc(rng, 0.9);
    r.in.c2 = sample_disc(rng, 0.9);
  };
  switch (d) {
    case Domain::G2:
      pick_out({OutboundKind::HalfS, OutboundKind::P, OutboundKind::Phi});
      pick_in({InboundKind::Form1, InboundKind::Form2, InboundKind::PairWith, InboundKind::AxisP});
      if (r.in.kind == InboundKind::Form1)
        r.in.blaschke = rng.coin() ? BlaschkeProduct(random_unimodular(rng))
                                   : BlaschkeProduct(random_unimodular(rng), sample_disc(rng, 0.9));
      if (r.in.kind == InboundKind::Form2) r.in.mobius = sample_fixed_point_free(rng);
      break;
    case Domain::G3:
      pick_out({OutboundKind::ThirdS1, OutboundKind::S3});
      pick_in({InboundKind::TripleWith, InboundKind::AxisS3});
      break;
    case Domain::Tetra:
      pick_out({OutboundKind::X1, OutboundKind::X2, OutboundKind::X3});
      pick_in({InboundKind::Triangular, InboundKind::Axis1, InboundKind::Axis2, InboundKind::Axis3});
      break;
    case Domain::Penta:
      pick_out({OutboundKind::HalfS, OutboundKind::P, OutboundKind::Phi, OutboundKind::PentaA});
      pick_in({InboundKind::PentaBase, InboundKind::PentaAxisA});
      break;
  }
  return r;
}

MapAtom random_lift_or_route(Domain d, Rng& rng) {
  if (d == Domain::G2 || d == Domain::G3) return SymLift{contracting_word(rng)};
  return random_route(d, rng);
}

std::vector<DomainPoint> dedupe(const std::vector<DomainPoint>& pts, double eps) {
  std::vector<DomainPoint> out;
  for (const auto& p : pts)
    if (std::none_of(out.begin(), out.end(), [&](const DomainPoint& q) { return max_dist(p, q) < eps; }))
      out.push_back(p);
  return out;
}

struct Collected {
  std::vector<DomainPoint> points;
  bool all_starts_fixed = true;
};

Collected collect_fixed_points(const SelfMap& f, const std::vector<DomainPoint>& grid, const Tolerances& tol) {
  Collected c;
  for (const auto& g : grid) {
    const auto res = newton_solve(f, g, 100, tol);
    // Boundary fixed points of the extended map attract Newton as well; root
    // noise can leave them with a tiny positive margin.
    if (!res.ok() || !(orbit_margin(res.point) > tol.fixed_margin)) {
      c.all_starts_fixed = false;
      continue;
    }
    if (res.iterations > 0) c.all_starts_fixed = false;
    c.points.push_back(res.point);
  }
  if (c.points.empty()) throw Error(ErrorCode::NoFixedPointFound, "no Newton start converged");
  return c;
}

double max_residual(const SelfMap& f, const std::vector<DomainPoint>& pts) {
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, fixed_residual(f, p));
  return r;
}

double spread(const std::vector<DomainPoint>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, max_dist(p, pts.front()));
  return s;
}

// Image-fixed residual of a retraction: max |f(rho x) - rho x|.
double image_fixed(const SelfMap& f, const SelfMap& rho, const std::vector<DomainPoint>& samples) {
  double r = 0.0;
  for (const auto& x : samples) r = std::max(r, fixed_residual(f, evaluate(rho, x)));
  return r;
}

SelfMap constant_map(const DomainPoint& z) { return {z.domain, {Constant{z}}}; }

SelfMap axis_retraction(OutboundKind out, InboundKind in) {
  DiscRoute r;
  r.out.kind = out;
  r.in.kind = in;
  return make_self_map(Domain::Tetra, {r});
}

void attach_witness(FixSetReport& rep, const SelfMap& f, const SelfMap& rho, const std::string& name,
                    const std::vector<DomainPoint>& samples) {
  rep.witness = name;
  rep.retraction_idempotency = retraction_defect(rho, samples);
  rep.image_fixed_residual = image_fixed(f, rho, samples);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Recipe r) {
  switch (r) {
    case Recipe::RandomAutomorphism: return "random-aut";
    case Recipe::RandomSymLift: return "random-symlift";
    case Recipe::RandomDiscRoute: return "random-route";
    case Recipe::MixedChain: return "mixed-chain";
    case Recipe::Any: return "any";
  }
  return "?";
}

std::optional<Recipe> parse_recipe(std::string_view name) {
  for (auto r : {Recipe::RandomAutomorphism, Recipe::RandomSymLift, Recipe::RandomDiscRoute, Recipe::MixedChain,
                 Recipe::Any})
    if (name == to_string(r)) return r;
  return std::nullopt;
}

std::optional<bool> automorphism_oracle(const Automorphism& f) {
  if (const auto* g = std::get_if<GnAut>(&f)) return !non_divergent_kind(mobius_classify(g->h).kind);
  if (const auto* p = std::get_if<PentaAut>(&f)) return !non_divergent_kind(mobius_classify(p->gamma).kind);
  const auto& w = std::get<TetraAut>(f).word;
  // L_nu R_chi F^mu acts on the triangular set {(a, b, ab)} through nu and
  // the induced disc map of R_chi; Aut(E) orbits diverge iff these do.
  if (w.size() < 2 || w.size() > 3) return std::nullopt;
  const auto* l = std::get_if<TetraL>(&w[0]);
  const auto* r = std::get_if<TetraR>(&w[1]);
  if (!l || !r) return std::nullopt;
  const MobiusTransform chi_t = tetra_R_on_triangle(r->chi);
  if (w.size() == 2)
    return !(non_divergent_kind(mobius_classify(l->nu).kind) && non_divergent_kind(mobius_classify(chi_t).kind));
  if (!std::holds_alternative<TetraF>(w[2])) return std::nullopt;
  return !non_divergent_kind(mobius_classify(compose(l->nu, chi_t)).kind);
}

SampledMap MapSampler::sample(std::uint64_t index) const {
  Rng rng(mix_seed(seed, index));
  Recipe r = recipe;
  if (r == Recipe::Any) r = static_cast<Recipe>(index % 4);
  SampledMap out;
  switch (r) {
    case Recipe::RandomAutomorphism: {
      const Automorphism a = random_automorphism(domain, rng);
      out.expect_divergent = automorphism_oracle(a);
      out.map = make_self_map(domain, {a});
      break;
    }
    case Recipe::RandomSymLift: out.map = make_self_map(domain, {random_lift_or_route(domain, rng)}); break;
    case Recipe::RandomDiscRoute: out.map = make_self_map(domain, {random_route(domain, rng)}); break;
    case Recipe::MixedChain:
    case Recipe::Any: {
      const int depth = rng.uniform_int(2, std::max(2, max_depth));
      std::vector<MapAtom> atoms;
      for (int i = 0; i < depth; ++i) {
        const double u = rng.uniform();
        if (u < 0.45) atoms.push_back(random_automorphism(domain, rng));
        else if (u < 0.75) atoms.push_back(random_lift_or_route(domain, rng));
        else if (u < 0.97) atoms.push_back(random_route(domain, rng));
        else atoms.push_back(Constant{sample_interior(domain, rng, 0.9)});
      }
      out.map = make_self_map(domain, std::move(atoms));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

TrialResult run_trial(const MapSampler& sampler, std::uint64_t index, int starts, const Tolerances& tol) {
  TrialResult t;
  t.index = index;
  SampledMap sm;
  try {
    sm = sampler.sample(index);
  } catch (const Error& e) {
    t.skipped = true;
    t.error = e.what();
    return t;
  }
  t.expect_divergent = sm.expect_divergent;
  Rng rng(mix_seed(mix_seed(sampler.seed, index), kStartStream));
  bool any_fixed = false, any_divergent = false;
  for (int s = 0; s < starts; ++s) {
    const DomainPoint z0 = sample_interior(sampler.domain, rng, 0.9);
    VerdictTag tag = VerdictTag::Undecided;
    try {
      const auto rec = iterate(sm.map, z0, tol);
      tag = classify_orbit(rec, sm.map, tol).tag;
    } catch (const Error& e) {
      if (t.error.empty()) t.error = e.what();
    }
    t.verdicts.push_back(tag);
    const bool fixed = tag == VerdictTag::ConvergedFixedPoint || tag == VerdictTag::Periodic ||
                       tag == VerdictTag::BoundedWithFixedPoint;
    const bool divergent = tag == VerdictTag::BoundaryDivergent;
    any_fixed = any_fixed || fixed;
    any_divergent = any_divergent || divergent;
    if (sm.expect_divergent && (*sm.expect_divergent ? !divergent : !fixed)) t.oracle_mismatch = true;
  }
  t.violation = any_fixed && any_divergent;
  return t;
}

ScanSummary scan_weak_wolff_denjoy(const MapSampler& sampler, int trials, int starts, const Tolerances& tol,
                                   int workers) {
  ScanSummary sum;
  sum.domain = sampler.domain;
  sum.recipe = sampler.recipe;
  sum.seed = sampler.seed;
  sum.trials = std::max(trials, 0);
  sum.starts = starts;
  sum.config = tol;
  std::vector<TrialResult> results(static_cast<std::size_t>(sum.trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < sum.trials; i = next++)
      results[static_cast<std::size_t>(i)] = run_trial(sampler, static_cast<std::uint64_t>(i), starts, tol);
  };
  const int n_threads = std::clamp(workers, 1, std::max(1, sum.trials));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int runs = 0, undecided = 0;
  for (const auto& t : results) {
    if (t.skipped) {
      ++sum.skipped;
      continue;
    }
    if (!t.error.empty()) ++sum.errors;
    for (auto tag : t.verdicts) {
      ++sum.histogram[tag];
      ++runs;
      if (tag == VerdictTag::Undecided) ++undecided;
    }
    if (t.violation) sum.violations.push_back(t);
    if (t.expect_divergent) {
      ++sum.oracle_checked;
      if (t.oracle_mismatch) sum.oracle_mismatches.push_back(t);
    }
  }
  sum.undecided_fraction = runs ? static_cast<double>(undecided) / runs : 0.0;
  sum.pass = sum.violations.empty() && sum.undecided_fraction < 0.05;
  return sum;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FixClass c) {
  switch (c) {
    case FixClass::FullDomain: return "FullDomain";
    case FixClass::MinusI: return "MinusI";
    case FixClass::InvolutionCurve: return "InvolutionCurve";
    case FixClass::Singleton: return "Singleton";
    case FixClass::RetractGeneric: return "RetractGeneric";
    case FixClass::TriangularContained: return "TriangularContained";
    case FixClass::AxisZ3: return "AxisZ3";
    case FixClass::Other: return "Other";
  }
  return "?";
}

std::vector<DomainPoint> default_fix_grid(Domain d, int count) { return halton_interior(d, count, 0.9); }

double retraction_defect(const SelfMap& rho, const std::vector<DomainPoint>& samples) {
  double r = 0.0;
  for (const auto& x : samples) {
    const DomainPoint y = evaluate(rho, x);
    r = std::max(r, max_dist(evaluate(rho, y), y));
  }
  return r;
}

bool retraction_check(const SelfMap& rho, const std::vector<DomainPoint>& samples, const Tolerances& tol) {
  return retraction_defect(rho, samples) < tol.retraction;
}

SelfMap retraction_s_to_zero() {
  DiscRoute r;
  r.out.kind = OutboundKind::P;
  r.in.kind = InboundKind::AxisP;
  return make_self_map(Domain::G2, {r});
}

SelfMap retraction_p3() { return axis_retraction(OutboundKind::X3, InboundKind::Axis3); }

double power_residual(const SelfMap& f, int a, int b, const std::vector<DomainPoint>& samples) {
  const int top = std::max(a, b);
  double r = 0.0;
  for (const auto& x : samples) {
    DomainPoint y = x, ya = x, yb = x;
    for (int k = 1; k <= top; ++k) {
      y = evaluate(f, y);
      if (k == a) ya = y;
      if (k == b) yb = y;
    }
    r = std::max(r, max_dist(ya, yb));
  }
  return r;
}

SelfMap tetra_reduced_form(cplx omega, cplx sigma) {
  TetraAut t;
  t.word.push_back(TetraL{MobiusTransform::from_paper_form(omega, 0.0)});
  t.word.push_back(TetraR{MobiusTransform::from_paper_form(sigma, 0.0)});
  return make_self_map(Domain::Tetra, {Automorphism{t}});
}

FixSetReport verify_fix_structure_g2(const SelfMap& f, const std::vector<DomainPoint>& grid, const Tolerances& tol) {
  if (f.domain != Domain::G2) throw Error(ErrorCode::InvalidArgument, "G2 map expected");
  FixSetReport rep;
  rep.domain = Domain::G2;
  const auto samples = halton_interior(Domain::G2, 1000, 0.95);
  const auto col = collect_fixed_points(f, grid, tol);
  rep.points = dedupe(col.points, 1e-9);
  rep.max_residual = max_residual(f, rep.points);
  rep.f2_identity_residual = power_residual(f, 2, 0, samples);
  const bool f2_is_identity = rep.f2_identity_residual < tol.sample_residual;

  // Classification from the point cloud alone.
  FixClass computed;
  if (col.all_starts_fixed) computed = FixClass::FullDomain;
  else if (spread(rep.points) < 1e-6) computed = FixClass::Singleton;
  else if (f2_is_identity &&
           std::all_of(rep.points.begin(), rep.points.end(), [](const DomainPoint& p) { return std::abs(p.z[0]) < 1e-8; }))
    computed = FixClass::MinusI;
  else if (f2_is_identity) computed = FixClass::InvolutionCurve;
  else computed = FixClass::RetractGeneric;
  rep.classification = computed;

  // Algebraic prediction for automorphisms.
  std::optional<MobiusTransform> h;
  if (const auto a = single_automorphism(f))
    if (const auto* g = std::get_if<GnAut>(&*a)) h = g->h;
  if (h) {
    const auto cls = mobius_classify(*h);
    if (cls.kind == MobiusKind::Identity) {
      rep.predicted = FixClass::FullDomain;
    } else if (approx_equal(*h, MobiusTransform::rotation_by(kPi), 1e-12)) {
      rep.predicted = FixClass::MinusI;
      for (const auto& p : rep.points) rep.model_distance = std::max(rep.model_distance, std::abs(p.z[0]));
    } else if (approx_equal(compose(*h, *h), MobiusTransform::identity(), 1e-10)) {
      // h(z) = (a - z)/(1 - conj(a) z); its curve {(z + h(z), z h(z))} is the
      // line s = a + conj(a) p.
      rep.predicted = FixClass::InvolutionCurve;
      const cplx a = h->pole();
      for (const auto& p : rep.points)
        rep.model_distance = std::max(rep.model_distance, std::abs(p.z[0] - a - std::conj(a) * p.z[1]));
      for (const cplx z : halton_disc(100, 0.95))
        rep.curve_residual = std::max(rep.curve_residual, fixed_residual(f, to_domain_point(symmetrize2(z, (*h)(z)))));
    } else if (cls.kind == MobiusKind::Elliptic) {
      rep.predicted = FixClass::Singleton;
      const cplx w = cls.fixed_points.front();
      const DomainPoint star = to_domain_point(symmetrize2(w, w));
      for (const auto& p : rep.points) rep.model_distance = std::max(rep.model_distance, max_dist(p, star));
    }
  }

  rep.retract = !f2_is_identity || computed == FixClass::FullDomain || computed == FixClass::MinusI;
  switch (computed) {
    case FixClass::FullDomain: attach_witness(rep, f, identity_map(Domain::G2), "identity", samples); break;
    case FixClass::MinusI: attach_witness(rep, f, retraction_s_to_zero(), "(s,p)->(0,p)", samples); break;
    case FixClass::Singleton: attach_witness(rep, f, constant_map(rep.points.front()), "constant", samples); break;
    case FixClass::RetractGeneric: {
      // Limit of the iterates from each sample, where they converge.
      std::vector<DomainPoint> limits;
      Tolerances t2 = tol;
      t2.n_max = 20000;
      bool all_converged = true;
      for (std::size_t i = 0; i < 100; ++i) {
        const auto rec = iterate(f, samples[i], t2);
        if (rec.stop != OrbitRecord::Stop::Converged) all_converged = false;
        limits.push_back(rec.points.back());
      }
      rep.witness = all_converged ? "iterate-limit" : "";
      for (const auto& y : limits) rep.image_fixed_residual = std::max(rep.image_fixed_residual, fixed_residual(f, y));
      rep.needs_review = !all_converged;
      if (!all_converged) rep.note = "iterates do not converge on every sample; no explicit retraction";
      break;
    }
    default: break;
  }
  if (rep.predicted) {
    const double model_tol = *rep.predicted == FixClass::Singleton ? 1e-6 : tol.curve;
    rep.consistent = *rep.predicted == computed && rep.model_distance < model_tol;
    if (*rep.predicted == FixClass::InvolutionCurve) rep.consistent = rep.consistent && rep.curve_residual < 1e-10;
  }
  rep.consistent = rep.consistent && rep.max_residual < tol.fixed_residual;
  if (rep.retract && !rep.witness.empty())
    rep.consistent = rep.consistent && rep.retraction_idempotency < tol.retraction &&
                     rep.image_fixed_residual < tol.fixed_residual;
  return rep;
}

FixSetReport verify_fix_structure_tetra(const SelfMap& f, const std::vector<DomainPoint>& grid,
                                        const Tolerances& tol) {
  if (f.domain != Domain::Tetra) throw Error(ErrorCode::InvalidArgument, "tetrablock map expected");
  FixSetReport rep;
  rep.domain = Domain::Tetra;
  const auto samples = halton_interior(Domain::Tetra, 1000, 0.95);
  const auto col = collect_fixed_points(f, grid, tol);
  rep.points = dedupe(col.points, 1e-9);
  rep.max_residual = max_residual(f, rep.points);
  rep.f4_f2_residual = power_residual(f, 4, 2, samples);
  rep.f2_identity_residual = power_residual(f, 2, 0, samples);

  auto all = [&](auto pred) { return std::all_of(rep.points.begin(), rep.points.end(), pred); };
  const bool axis3 = all([](const DomainPoint& p) { return std::abs(p.z[0]) < 1e-8 && std::abs(p.z[1]) < 1e-8; });
  const bool triangular = all([](const DomainPoint& p) { return std::abs(p.z[2] - p.z[0] * p.z[1]) < 1e-8; });
  FixClass computed = FixClass::Other;
  if (col.all_starts_fixed) computed = FixClass::FullDomain;
  else if (axis3 && spread(rep.points) > 1e-3) computed = FixClass::AxisZ3;
  else if (triangular) computed = FixClass::TriangularContained;
  rep.classification = computed;

  // Reduced form (-omega z1, -sigma z2, sigma omega z3): read omega and sigma
  // off the axes, then confirm the map is that diagonal map.
  const double t = 0.1;
  const DomainPoint e1 = evaluate(f, to_domain_point(TetraPoint{t, 0.0, 0.0}));
  const DomainPoint e2 = evaluate(f, to_domain_point(TetraPoint{0.0, t, 0.0}));
  const cplx omega = -e1.z[0] / t, sigma = -e2.z[1] / t;
  double diag_defect = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const TetraPoint x = as_tetra(samples[i]);
    const TetraPoint y = as_tetra(evaluate(f, samples[i]));
    diag_defect = std::max({diag_defect, std::abs(y.x1 + omega * x.x1), std::abs(y.x2 + sigma * x.x2),
                            std::abs(y.x3 - sigma * omega * x.x3)});
  }
  if (diag_defect < 1e-12) {
    if (std::abs(omega + 1.0) < 1e-9 && std::abs(sigma + 1.0) < 1e-9) rep.predicted = FixClass::FullDomain;
    else if (std::abs(sigma * omega - 1.0) < 1e-9) rep.predicted = FixClass::AxisZ3;
    else rep.predicted = FixClass::TriangularContained;
  } else {
    rep.note = "not a reduced diagonal form; residual data only";
  }

  switch (computed) {
    case FixClass::FullDomain: attach_witness(rep, f, identity_map(Domain::Tetra), "identity", samples); break;
    case FixClass::AxisZ3:
      attach_witness(rep, f, retraction_p3(), "P3", samples);
      for (const auto& p : rep.points)
        rep.model_distance = std::max({rep.model_distance, std::abs(p.z[0]), std::abs(p.z[1])});
      break;
    case FixClass::TriangularContained: {
      const bool x1_line = all([](const DomainPoint& p) { return std::abs(p.z[1]) < 1e-8 && std::abs(p.z[2]) < 1e-8; });
      const bool x2_line = all([](const DomainPoint& p) { return std::abs(p.z[0]) < 1e-8 && std::abs(p.z[2]) < 1e-8; });
      if (spread(rep.points) < 1e-6) attach_witness(rep, f, constant_map(rep.points.front()), "constant", samples);
      else if (x1_line) attach_witness(rep, f, axis_retraction(OutboundKind::X1, InboundKind::Axis1), "P1", samples);
      else if (x2_line) attach_witness(rep, f, axis_retraction(OutboundKind::X2, InboundKind::Axis2), "P2", samples);
      for (const auto& p : rep.points) rep.model_distance = std::max(rep.model_distance, std::abs(p.z[2] - p.z[0] * p.z[1]));
      break;
    }
    default: break;
  }
  rep.retract = !rep.witness.empty() || rep.f4_f2_residual > tol.sample_residual;
  if (rep.predicted) rep.consistent = *rep.predicted == computed;
  rep.consistent = rep.consistent && rep.max_residual < tol.fixed_residual;
  if (!rep.witness.empty())
    rep.consistent = rep.consistent && rep.retraction_idempotency < tol.retraction &&
                     rep.image_fixed_residual < tol.fixed_residual;
  return rep;
}

FixSetReport verify_fix_structure(const SelfMap& f, const std::vector<DomainPoint>& grid, const Tolerances& tol) {
  if (f.domain == Domain::G2) return verify_fix_structure_g2(f, grid, tol);
  if (f.domain == Domain::Tetra) return verify_fix_structure_tetra(f, grid, tol);
  FixSetReport rep;
  rep.domain = f.domain;
  const auto col = collect_fixed_points(f, grid, tol);
  rep.points = dedupe(col.points, 1e-9);
  rep.max_residual = max_residual(f, rep.points);
  rep.classification = col.all_starts_fixed ? FixClass::FullDomain
                       : spread(rep.points) < 1e-6 ? FixClass::Singleton
                                                   : FixClass::Other;
  if (rep.classification == FixClass::Other) rep.needs_review = true;
  rep.consistent = rep.max_residual < tol.fixed_residual;
  return rep;
}

// ---------------------------------------------------------------------------

TargetReport verify_target_structure(const SelfMap& f, const std::vector<DomainPoint>& starts, const Tolerances& tol) {
  if (f.domain != Domain::G2) throw Error(ErrorCode::InvalidArgument, "target sets are estimated on G2 only");
  if (starts.empty()) throw Error(ErrorCode::InvalidArgument, "at least one start is required");
  TargetReport rep;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    StartTarget st;
    st.start = starts[i];
    const auto rec = iterate(f, starts[i], tol);
    st.verdict = classify_orbit(rec, f, tol).tag;
    if (i == 0 && st.verdict != VerdictTag::BoundaryDivergent)
      throw Error(ErrorCode::NotDivergent, "first start is not boundary divergent");
    if (st.verdict == VerdictTag::BoundaryDivergent) {
      // The first half of the orbit is the approach; it leaves transient
      // clusters below the target margin that are not accumulation points.
      st.estimate = target_set_from_orbit(rec, static_cast<int>(rec.points.size() / 2), tol);
      for (const auto& c : st.estimate->clusters)
        st.royal_distance = std::max(st.royal_distance, distance_to_royal_circle(c.representative));
    }
    rep.max_royal_distance = std::max(rep.max_royal_distance, st.royal_distance);
    rep.starts.push_back(std::move(st));
  }

  auto is = [](const StartTarget& s, TargetClass c) { return s.estimate && s.estimate->classification == c; };
  const auto royal_it = std::find_if(rep.starts.begin(), rep.starts.end(),
                                     [&](const StartTarget& s) { return is(s, TargetClass::RoyalCircle); });
  if (royal_it != rep.starts.end()) {
    const double t0 = royal_it->estimate->thetas.front();
    rep.theta = t0;
    for (const auto& s : rep.starts) {
      if (!is(s, TargetClass::RoyalCircle)) {
        rep.royal_propagates = false;
        continue;
      }
      for (double t : s.estimate->thetas)
        if (std::abs(angle_diff(t, t0)) >= tol.angle) rep.royal_propagates = false;
    }
  }
  const auto mixed_it = std::find_if(rep.starts.begin(), rep.starts.end(),
                                     [&](const StartTarget& s) { return is(s, TargetClass::MixedFace); });
  if (mixed_it != rep.starts.end()) {
    const double t0 = mixed_it->estimate->thetas.front();
    if (!rep.theta) rep.theta = t0;
    for (const auto& s : rep.starts) {
      if (!s.estimate || s.estimate->clusters.empty()) {
        rep.mixed_propagates = false;
        continue;
      }
      for (const auto& c : s.estimate->clusters) {
        const bool hit = std::any_of(c.factors.begin(), c.factors.end(), [&](cplx z) {
          return std::abs(std::abs(z) - 1.0) < tol.unimodular && std::abs(angle_diff(std::arg(z), t0)) < tol.angle;
        });
        if (!hit) rep.mixed_propagates = false;
      }
    }
  }
  const bool all_divergent = std::all_of(rep.starts.begin(), rep.starts.end(), [](const StartTarget& s) {
    return s.verdict == VerdictTag::BoundaryDivergent;
  });
  rep.pass = all_divergent && rep.royal_propagates && rep.mixed_propagates;
  return rep;
}

SelfMap mixed_face_map(cplx omega, cplx c) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "omega must be unimodular");
  if (!(std::abs(c) < 1.0)) throw Error(ErrorCode::InvalidArgument, "c must lie in the disc");
  // M(l) = Phi_omega(pi_2(l, c)) = (A l + B) / (C l + D) sends conj(omega) to -conj(omega).
  const cplx A = 2.0 * omega * c - 1.0, B = -c, C = -omega, D = 2.0 - omega * c;
  const cplx target = std::conj(omega);
  const double dm = std::abs((A * D - B * C) / ((C * target + D) * (C * target + D)));
  // g = -H with H(z) = (z + r tau) / (1 + r conj(tau) z), tau = -conj(omega):
  // g(tau) = conj(omega) and |H'(tau)| = (1 - r)/(1 + r) = 1 / (2 dm).
  const double lh = 0.5 / dm;
  const double r = (1.0 - lh) / (1.0 + lh);
  const cplx tau = -std::conj(omega);
  DiscRoute route;
  route.out.kind = OutboundKind::Phi;
  route.out.omega = omega;
  route.g = DiscWord{{MobiusTransform(kPi, -r * tau)}};
  route.in.kind = InboundKind::PairWith;
  route.in.c1 = c;
  return make_self_map(Domain::G2, {route});
}

// ---------------------------------------------------------------------------

MobiusTransform elliptic_with(cplx w, int k, int q) {
  const MobiusTransform phi(0.0, w);
  return compose(phi.inverse(), compose(MobiusTransform::rotation_by(kTwoPi * k / q), phi));
}

Automorphism sample_periodic_automorphism(Domain d, Rng& rng) {
  auto periodic = [&] {
    const int q = rng.uniform_int(2, 12);
    return elliptic_with(sample_disc(rng, 0.8), rng.uniform_int(1, q - 1), q);
  };
  switch (d) {
    case Domain::G2: return GnAut{2, periodic()};
    case Domain::G3: return GnAut{3, periodic()};
    case Domain::Tetra: {
      TetraAut t;
      t.word.push_back(TetraL{periodic()});
      t.word.push_back(TetraR{periodic()});
      return t;
    }
    case Domain::Penta: {
      // gamma^q = id makes f^q multiply a by a constant c with |c| = 1, so
      // omega is chosen with omega^q c = 1 up to a q-th root of unity.
      const int q = rng.uniform_int(2, 12);
      const auto gamma = elliptic_with(sample_disc(rng, 0.8), rng.uniform_int(1, q - 1), q);
      PentaPoint x{0.01, 0.0, 0.0};
      for (int k = 0; k < q; ++k) x = penta_apply_unchecked(PentaAut{1.0, gamma}, x);
      const double c_arg = std::arg(x.a / 0.01);
      const int j = rng.uniform_int(0, q - 1);
      return PentaAut{std::polar(1.0, (kTwoPi * j - c_arg) / q), gamma};
    }
  }
  return GnAut{};
}

}  // namespace mudomains
