#include "mudomains/cli/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

namespace mudomains::cli {

namespace {

int scaled(int n, const SuiteOptions& o) {
  return std::max(1, static_cast<int>(std::lround(n * o.scale)));
}

double dist(const DomainPoint& a, const DomainPoint& b) { return max_dist(a, b); }

// ---------------------------------------------------------------------------

SuiteResult membership_suite(const SuiteOptions& o) {
  SuiteResult r{"membership", "G2 magic-function membership agrees with the root oracle"};
  const int n = scaled(100000, o);
  Rng rng(mix_seed(o.seed, 0xa1));
  int compared = 0, disagreements = 0, inside = 0, outside = 0;
  json first_bad = nullptr;
  for (int i = 0; i < n; ++i) {
    // Half the points come from roots near the unit circle, half from a box
    // around G2 in (s, p) coordinates.
    SymPoint2 pt;
    if (i % 2 == 0) pt = symmetrize2(sample_disc(rng, 1.25), sample_disc(rng, 1.25));
    else pt = {sample_disc(rng, 2.2), sample_disc(rng, 1.2)};
    const auto oracle = g2_membership_oracle(pt);
    if (!(std::abs(oracle.margin) > 1e-9)) continue;
    const auto magic = g2_membership(pt);
    ++compared;
    (oracle.status == Status::Inside ? inside : outside)++;
    if (magic.status != oracle.status) {
      if (first_bad.is_null())
        first_bad = json{{"s", to_json(pt.s)}, {"p", to_json(pt.p)}, {"oracle_margin", oracle.margin},
                         {"magic_margin", magic.margin}};
      ++disagreements;
    }
  }
  r.details = {{"points", n}, {"compared", compared}, {"inside", inside}, {"outside", outside},
               {"disagreements", disagreements}, {"first_disagreement", first_bad}};
  r.pass = disagreements == 0 && compared > 0;
  return r;
}

// ---------------------------------------------------------------------------

TetraAut random_tetra_word(Rng& rng) {
  TetraAut t;
  const int len = rng.uniform_int(1, 4);
  for (int i = 0; i < len; ++i) {
    const int k = rng.uniform_int(0, 2);
    if (k == 0) t.word.push_back(TetraL{sample_mobius(rng)});
    else if (k == 1) t.word.push_back(TetraR{sample_mobius(rng)});
    else t.word.push_back(TetraF{});
  }
  return t;
}

Automorphism random_group_element(Domain d, Rng& rng) {
  switch (d) {
    case Domain::G2: return GnAut{2, sample_mobius(rng)};
    case Domain::G3: return GnAut{3, sample_mobius(rng)};
    case Domain::Tetra: return random_tetra_word(rng);
    case Domain::Penta: return PentaAut{std::polar(1.0, rng.uniform(0.0, kTwoPi)), sample_mobius(rng)};
  }
  return GnAut{};
}

SuiteResult group_laws_suite(const SuiteOptions& o) {
  SuiteResult r{"group-laws", "automorphism inverses, domain preservation, triangular invariance"};
  const int n = scaled(10000, o);
  bool pass = true;
  json per = json::object();
  for (Domain d : {Domain::G2, Domain::G3, Domain::Tetra, Domain::Penta}) {
    Rng rng(mix_seed(o.seed, 0xa2 + static_cast<int>(d)));
    double worst_round_trip = 0.0, min_margin = 1.0;
    int failures = 0;
    for (int i = 0; i < n; ++i) {
      const Automorphism f = random_group_element(d, rng);
      const DomainPoint z = sample_interior(d, rng, 0.95);
      const DomainPoint fz = apply_unchecked(f, z);
      const DomainPoint back = apply_unchecked(inverse(f), fz);
      const double rt = dist(back, z);
      const double m = orbit_margin(fz);
      worst_round_trip = std::max(worst_round_trip, rt);
      min_margin = std::min(min_margin, m);
      if (!(rt < 1e-10) || !(m > 0.0)) ++failures;
    }
    per[std::string(to_string(d))] = {{"samples", n}, {"max_round_trip", worst_round_trip},
                                      {"min_image_margin", min_margin}, {"failures", failures}};
    pass = pass && failures == 0;
  }
  Rng rng(mix_seed(o.seed, 0xa2f));
  const int pairs = scaled(1000, o);
  double worst_tri = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const TetraAut f = random_tetra_word(rng);
    const cplx a = sample_disc(rng, 0.95), b = sample_disc(rng, 0.95);
    const TetraPoint y = tetra_apply_unchecked(f, {a, b, a * b});
    worst_tri = std::max(worst_tri, std::abs(y.x3 - y.x1 * y.x2));
  }
  per["triangular"] = {{"pairs", pairs}, {"max_residual", worst_tri}};
  r.details = per;
  r.pass = pass && worst_tri < 1e-10;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult wwd_suite(Domain d, const SuiteOptions& o) {
  SuiteResult r{"wwd-" + std::string(to_string(d)), "fixed point or compact divergence on " +
                                                        std::string(to_string(d))};
  const MapSampler sampler{d, Recipe::Any, o.seed};
  const ScanSummary s = scan_weak_wolff_denjoy(sampler, scaled(1000, o), 3, o.tol, o.workers);
  r.details = to_json(s);
  r.pass = s.pass && s.oracle_mismatches.empty() && s.oracle_checked > 0;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult penta_orbit_suite(const SuiteOptions& o) {
  SuiteResult r{"penta-orbit", "pentablock orbit of the origin follows the disc orbit of gamma"};
  const int n = scaled(100, o);
  Rng rng(mix_seed(o.seed, 0xa4));
  // The identity describes the fixed-point-free case, where the orbit runs
  // out to the boundary. Elliptic gamma is reported alongside: its orbits
  // return from near the boundary, and the (s, p) coordinates amplify the
  // rounding picked up there by the square of the disc derivative.
  auto orbit_residual = [](const PentaAut& f) {
    PentaPoint z{0.0, 0.0, 0.0};
    cplx g = 0.0;
    double worst = 0.0;
    for (int k = 1; k <= 100; ++k) {
      z = penta_apply_unchecked(f, z);
      g = f.gamma(g);
      worst = std::max({worst, std::abs(z.a), std::abs(z.s - 2.0 * g), std::abs(z.p - g * g)});
    }
    return worst;
  };
  double worst = 0.0, worst_elliptic = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx omega = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    MobiusTransform gamma;
    for (;;) {
      gamma = sample_mobius(rng);
      const auto kind = mobius_classify(gamma).kind;
      if (kind != MobiusKind::Elliptic && kind != MobiusKind::Identity) break;
      worst_elliptic = std::max(worst_elliptic, orbit_residual(PentaAut{omega, gamma}));
    }
    worst = std::max(worst, orbit_residual(PentaAut{omega, gamma}));
  }
  r.details = {{"maps", n}, {"steps", 100}, {"max_residual", worst}, {"elliptic_max_residual", worst_elliptic}};
  r.pass = worst < 1e-12;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult fix_g2_suite(const SuiteOptions& o) {
  SuiteResult r{"fix-g2", "G2 fixed sets: involution curves and the -I retraction"};
  const int n = scaled(100, o);
  Rng rng(mix_seed(o.seed, 0xa5));
  const auto grid = default_fix_grid(Domain::G2);
  const auto disc = halton_disc(100, 0.95);
  double worst_curve = 0.0, worst_model = 0.0;
  int wrong_class = 0, flagged_retract = 0, empty = 0;
  for (int i = 0; i < n; ++i) {
    cplx w;
    do w = sample_disc(rng, 0.8);
    while (std::abs(w) < 1e-3);
    const MobiusTransform h = elliptic_with(w, 1, 2);
    const SelfMap f = make_self_map(Domain::G2, {GnAut{2, h}});
    for (cplx z : disc) {
      const DomainPoint c = to_domain_point(symmetrize2(z, h(z)));
      worst_curve = std::max(worst_curve, dist(evaluate(f, c), c));
    }
    const auto rep = verify_fix_structure_g2(f, grid, o.tol);
    if (rep.points.empty()) ++empty;
    if (rep.classification != FixClass::InvolutionCurve) ++wrong_class;
    if (rep.retract) ++flagged_retract;
    worst_model = std::max(worst_model, rep.model_distance);
  }

  const SelfMap minus_i = make_self_map(Domain::G2, {GnAut{2, MobiusTransform::rotation_by(kPi)}});
  const SelfMap rho = retraction_s_to_zero();
  const auto samples = halton_interior(Domain::G2, 1000, 0.95);
  const double idem = retraction_defect(rho, samples);
  double image_fixed = 0.0;
  for (const auto& x : samples) {
    const DomainPoint y = evaluate(rho, x);
    image_fixed = std::max(image_fixed, dist(evaluate(minus_i, y), y));
  }
  const auto rep = verify_fix_structure_g2(minus_i, grid, o.tol);

  r.details = {{"involutions", n},
               {"max_curve_residual", worst_curve},
               {"max_model_distance", worst_model},
               {"misclassified", wrong_class},
               {"retract_flagged", flagged_retract},
               {"empty_reports", empty},
               {"minus_i", {{"classification", std::string(to_string(rep.classification))},
                            {"retract", rep.retract},
                            {"idempotency", idem},
                            {"image_fixed_residual", image_fixed}}}};
  r.pass = worst_curve < 1e-10 && worst_model < 1e-8 && wrong_class == 0 && flagged_retract == 0 && empty == 0 &&
           idem < 1e-14 && image_fixed < 1e-14 && rep.classification == FixClass::MinusI && rep.retract;
  return r;
}

// ---------------------------------------------------------------------------

// Case analysis of (-w z1, -s z2, s w z3) = (z1, z2, z3): z1 is free only for
// w = -1, z2 only for s = -1, z3 only for s w = 1.
FixClass reduced_form_case(int jw, int js, int steps) {
  const bool w_neg = 2 * jw == steps, s_neg = 2 * js == steps, prod_one = (jw + js) % steps == 0;
  if (w_neg && s_neg) return FixClass::FullDomain;
  if (prod_one) return FixClass::AxisZ3;
  return FixClass::TriangularContained;
}

SuiteResult fix_tetra_suite(const SuiteOptions& o) {
  SuiteResult r{"fix-tetra", "tetrablock fixed sets of the reduced forms"};
  constexpr int steps = 10;
  const auto grid = default_fix_grid(Domain::Tetra);
  int mismatches = 0, checked = 0;
  std::map<std::string, int> counts;
  json bad = json::array();
  for (int jw = 0; jw < steps; ++jw) {
    for (int js = 0; js < steps; ++js) {
      const cplx w = std::polar(1.0, kTwoPi * jw / steps), s = std::polar(1.0, kTwoPi * js / steps);
      const FixClass expected = reduced_form_case(jw, js, steps);
      const auto rep = verify_fix_structure_tetra(tetra_reduced_form(w, s), grid, o.tol);
      ++checked;
      ++counts[std::string(to_string(rep.classification))];
      if (rep.classification != expected || (rep.predicted && *rep.predicted != expected) || !rep.consistent) {
        ++mismatches;
        if (bad.size() < 5)
          bad.push_back({{"omega_step", jw}, {"sigma_step", js}, {"expected", std::string(to_string(expected))},
                         {"computed", std::string(to_string(rep.classification))}});
      }
    }
  }
  const auto samples = halton_interior(Domain::Tetra, 1000, 0.95);
  const bool p3 = retraction_check(retraction_p3(), samples, o.tol);
  json hist = json::object();
  for (const auto& [k, v] : counts) hist[k] = v;
  r.details = {{"grid", checked}, {"classes", hist}, {"mismatches", mismatches}, {"examples", bad},
               {"p3_retraction", p3}, {"p3_defect", retraction_defect(retraction_p3(), samples)}};
  r.pass = mismatches == 0 && p3;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult target_suite(const SuiteOptions& o) {
  SuiteResult r{"target", "target sets: royal circle and mixed-face propagation"};
  Tolerances tol = o.tol;
  tol.n_max = std::max(tol.n_max, 100000);
  Rng rng(mix_seed(o.seed, 0xa7));
  const int n_lifts = scaled(50, o), n_mixed = std::max(10, scaled(10, o)), n_starts = 10;

  auto starts_for = [&](Rng& g) {
    std::vector<DomainPoint> s;
    for (int k = 0; k < n_starts; ++k) s.push_back(sample_interior(Domain::G2, g, 0.9));
    return s;
  };

  int royal_fail = 0;
  double worst_distance = 0.0, worst_angle = 0.0;
  for (int i = 0; i < n_lifts; ++i) {
    MobiusTransform h;
    do h = sample_mobius(rng);
    while (mobius_classify(h).kind == MobiusKind::Elliptic || mobius_classify(h).kind == MobiusKind::Identity);
    const SelfMap f = make_self_map(Domain::G2, {GnAut{2, h}});
    const auto rep = verify_target_structure(f, starts_for(rng), tol);
    const double theta = std::arg(denjoy_wolff_point(h));
    const double err = rep.theta ? std::abs(angle_diff(*rep.theta, theta)) : kPi;
    worst_distance = std::max(worst_distance, rep.max_royal_distance);
    worst_angle = std::max(worst_angle, err);
    if (!rep.pass || !rep.theta || rep.max_royal_distance >= 1e-6 || err >= tol.angle) ++royal_fail;
  }

  int mixed_fail = 0;
  double worst_mixed = 0.0;
  for (int i = 0; i < n_mixed; ++i) {
    const cplx w = std::polar(1.0, kTwoPi * (i + rng.uniform()) / n_mixed);
    const cplx c = sample_disc(rng, 0.6);
    const SelfMap f = mixed_face_map(w, c);
    const auto starts = starts_for(rng);
    const auto rep = verify_target_structure(f, starts, tol);
    const double expected = std::arg(std::conj(w));
    bool ok = rep.pass && rep.starts.front().estimate &&
              rep.starts.front().estimate->classification == TargetClass::MixedFace;
    for (const auto& s : rep.starts) {
      if (!s.estimate) continue;
      for (const auto& cl : s.estimate->clusters) {
        double best = kPi;
        for (cplx z : cl.factors)
          if (std::abs(std::abs(z) - 1.0) < tol.unimodular) best = std::min(best, std::abs(angle_diff(std::arg(z), expected)));
        worst_mixed = std::max(worst_mixed, best);
        if (best >= tol.angle) ok = false;
      }
    }
    if (!ok) ++mixed_fail;
  }
  r.details = {{"royal_maps", n_lifts},
               {"royal_failures", royal_fail},
               {"max_royal_distance", worst_distance},
               {"max_angle_error", worst_angle},
               {"mixed_maps", n_mixed},
               {"mixed_failures", mixed_fail},
               {"max_mixed_angle_error", worst_mixed},
               {"starts_per_map", n_starts},
               {"n_max", tol.n_max}};
  r.pass = royal_fail == 0 && mixed_fail == 0;
  return r;
}

// ---------------------------------------------------------------------------

DomainPoint invariant_disc_point(Domain d, cplx w) {
  switch (d) {
    case Domain::G2: return to_domain_point(symmetrize2(w, w));
    case Domain::G3: return to_domain_point(symmetrize3(w, w, w));
    case Domain::Tetra: return to_domain_point(TetraPoint{w, w, w * w});
    case Domain::Penta: return to_domain_point(PentaPoint{0.0, 2.0 * w, w * w});
  }
  return DomainPoint{d, {}};
}

SuiteResult periodic_suite(const SuiteOptions& o) {
  SuiteResult r{"periodic", "periodic automorphisms have Newton fixed points"};
  const int n = scaled(500, o);
  int detected = 0, exceptions = 0;
  double worst = 0.0;
  std::map<int, int> periods;
  for (int i = 0; i < n; ++i) {
    const Domain d = static_cast<Domain>(i % 4);
    Rng rng(mix_seed(o.seed ^ 0xa8, static_cast<std::uint64_t>(i)));
    const Automorphism f = sample_periodic_automorphism(d, rng);
    std::vector<DomainPoint> probes;
    for (int k = 0; k < 6; ++k) probes.push_back(sample_interior(d, rng, 0.9));
    const auto period = periodicity_detect(f, probes);
    if (!period) continue;
    ++detected;
    ++periods[*period];
    const SelfMap sf = make_self_map(d, {f});
    std::vector<DomainPoint> starts{DomainPoint{d, {}}};
    starts.insert(starts.end(), probes.begin(), probes.end());
    for (int k = 0; k < 8; ++k) starts.push_back(sample_interior(d, rng, 0.5));
    // Cycle means, then points of the invariant disc {pi(w, ..., w)} (the
    // triangular diagonal on the tetrablock); Newton basins on G3 are small.
    for (const auto& probe : probes) {
      DomainPoint mean{d, {}}, z = probe;
      for (int j = 0; j < *period; ++j) {
        for (int q = 0; q < z.dim(); ++q) mean.z[q] += z.z[q] / static_cast<double>(*period);
        z = apply_unchecked(f, z);
      }
      starts.push_back(mean);
    }
    for (cplx w : halton_disc(16, 0.9)) starts.push_back(invariant_disc_point(d, w));
    bool found = false;
    for (const auto& s : starts) {
      const auto res = newton_solve(sf, s, 50, o.tol);
      if (res.ok() && res.residual < 1e-12) {
        worst = std::max(worst, res.residual);
        found = true;
        break;
      }
    }
    if (!found) ++exceptions;
  }
  json hist = json::object();
  for (const auto& [p, c] : periods) hist[std::to_string(p)] = c;
  r.details = {{"trials", n}, {"periodic", detected}, {"periods", hist}, {"exceptions", exceptions},
               {"max_residual", worst}};
  r.pass = exceptions == 0 && detected > 0;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult determinism_suite(const SuiteOptions& o) {
  SuiteResult r{"determinism", "scan summaries are identical for any worker count"};
  RunConfig cfg;
  cfg.command = "scan";
  cfg.seed = o.seed;
  cfg.tol = o.tol;
  const int trials = scaled(200, o);
  cfg.params = {{"domain", "g2"}, {"recipe", "any"}, {"trials", trials}, {"starts", 3}};
  std::vector<std::string> dumps;
  for (int workers : {1, 4, 8, 1, 4, 8}) {
    const auto s = scan_weak_wolff_denjoy(MapSampler{Domain::G2, Recipe::Any, o.seed}, trials, 3, o.tol, workers);
    json env = make_envelope(cfg, to_json(s), utc_timestamp());
    env.erase("timestamp");
    dumps.push_back(env.dump(2));
  }
  const bool same = std::all_of(dumps.begin(), dumps.end(), [&](const std::string& d) { return d == dumps.front(); });
  r.details = {{"runs", dumps.size()}, {"workers", {1, 4, 8}}, {"identical", same}, {"bytes", dumps.front().size()}};
  r.pass = same;
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"membership", "group-laws", "wwd-g2",   "wwd-g3",
                                                 "wwd-tetra",  "wwd-penta",  "penta-orbit", "fix-g2",
                                                 "fix-tetra",  "target",     "periodic", "determinism"};
  return names;
}

std::vector<std::string> expand_suite(std::string_view name) {
  if (name == "all") return suite_names();
  if (name == "wwd-all") return {"wwd-g2", "wwd-g3", "wwd-tetra", "wwd-penta"};
  const auto& n = suite_names();
  if (std::find(n.begin(), n.end(), name) != n.end()) return {std::string(name)};
  return {};
}

SuiteResult run_suite(std::string_view name, const SuiteOptions& opts) {
  static const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>, std::less<>> table = {
      {"membership", membership_suite},
      {"group-laws", group_laws_suite},
      {"wwd-g2", [](const SuiteOptions& o) { return wwd_suite(Domain::G2, o); }},
      {"wwd-g3", [](const SuiteOptions& o) { return wwd_suite(Domain::G3, o); }},
      {"wwd-tetra", [](const SuiteOptions& o) { return wwd_suite(Domain::Tetra, o); }},
      {"wwd-penta", [](const SuiteOptions& o) { return wwd_suite(Domain::Penta, o); }},
      {"penta-orbit", penta_orbit_suite},
      {"fix-g2", fix_g2_suite},
      {"fix-tetra", fix_tetra_suite},
      {"target", target_suite},
      {"periodic", periodic_suite},
      {"determinism", determinism_suite},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown suite '" + std::string(name) + "'");
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  try {
    r = it->second(opts);
  } catch (const Error& e) {
    r.name = std::string(name);
    r.pass = false;
    r.details = {{"error", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace mudomains::cli
