#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mudomains/dynamics.hpp"
#include "mudomains/sampling.hpp"

namespace mudomains {

enum class Recipe { RandomAutomorphism, RandomSymLift, RandomDiscRoute, MixedChain, Any };

std::string_view to_string(Recipe r);
/// Accepts random-aut, random-symlift, random-route, mixed-chain, any.
std::optional<Recipe> parse_recipe(std::string_view name);

struct SampledMap {
  SelfMap map;
  /// For automorphism trials: whether the disc-classifier oracle predicts
  /// compact divergence.
  std::optional<bool> expect_divergent;
};

/// Deterministic map source: sample(i) depends only on (domain, recipe, seed, i).
struct MapSampler {
  Domain domain = Domain::G2;
  Recipe recipe = Recipe::RandomAutomorphism;
  std::uint64_t seed = 0;
  int max_depth = 4;

  SampledMap sample(std::uint64_t index) const;
};

/// Prediction from the underlying disc maps: true if the iterates should be
/// compactly divergent, nullopt when no oracle applies (general tetrablock words).
std::optional<bool> automorphism_oracle(const Automorphism& f);

// ---------------------------------------------------------------------------
// Weak Wolff-Denjoy scan

struct TrialResult {
  std::uint64_t index = 0;
  bool skipped = false;
  std::string error;
  std::vector<VerdictTag> verdicts;
  std::optional<bool> expect_divergent;
  bool violation = false;
  bool oracle_mismatch = false;
};

struct ScanSummary {
  Domain domain = Domain::G2;
  Recipe recipe = Recipe::RandomAutomorphism;
  std::uint64_t seed = 0;
  int trials = 0;
  int starts = 0;
  int skipped = 0;
  int errors = 0;
  std::map<VerdictTag, int> histogram;
  std::vector<TrialResult> violations;
  int oracle_checked = 0;
  std::vector<TrialResult> oracle_mismatches;
  double undecided_fraction = 0.0;
  Tolerances config;
  bool pass = true;
};

TrialResult run_trial(const MapSampler& sampler, std::uint64_t index, int starts, const Tolerances& tol = {});

/// Trials run on `workers` threads; the summary does not depend on the
/// worker count.
ScanSummary scan_weak_wolff_denjoy(const MapSampler& sampler, int trials, int starts, const Tolerances& tol = {},
                                   int workers = 1);

// ---------------------------------------------------------------------------
// Fixed-point sets

enum class FixClass {
  FullDomain,
  MinusI,
  InvolutionCurve,
  Singleton,
  RetractGeneric,
  TriangularContained,
  AxisZ3,
  Other,
};

std::string_view to_string(FixClass c);

struct FixSetReport {
  Domain domain = Domain::G2;
  FixClass classification = FixClass::Other;
  /// Algebraic prediction, when the map is a recognised automorphism.
  std::optional<FixClass> predicted;
  std::vector<DomainPoint> points;
  /// max |f(z) - z| over collected points.
  double max_residual = 0.0;
  /// max distance of collected points from the predicted model.
  double model_distance = 0.0;
  /// InvolutionCurve: max |f - id| over 100 curve samples.
  double curve_residual = 0.0;
  bool retract = false;
  std::string witness;
  double retraction_idempotency = 0.0;
  double image_fixed_residual = 0.0;
  /// max |f(f(x)) - x| over 10^3 Halton points.
  double f2_identity_residual = 0.0;
  /// max |f^4(x) - f^2(x)| over 10^3 Halton points (tetrablock).
  double f4_f2_residual = 0.0;
  /// Multi-cluster finding for a map without an explicit model.
  bool needs_review = false;
  bool consistent = true;
  std::string note;
};

/// Default Newton start grid: 64 Halton interior points.
std::vector<DomainPoint> default_fix_grid(Domain d, int count = 64);

FixSetReport verify_fix_structure_g2(const SelfMap& f, const std::vector<DomainPoint>& grid,
                                     const Tolerances& tol = {});
FixSetReport verify_fix_structure_tetra(const SelfMap& f, const std::vector<DomainPoint>& grid,
                                        const Tolerances& tol = {});
FixSetReport verify_fix_structure(const SelfMap& f, const std::vector<DomainPoint>& grid, const Tolerances& tol = {});

/// max over samples of |rho(rho(x)) - rho(x)|.
double retraction_defect(const SelfMap& rho, const std::vector<DomainPoint>& samples);
/// retraction_defect < tol.retraction.
bool retraction_check(const SelfMap& rho, const std::vector<DomainPoint>& samples, const Tolerances& tol = {});

/// (s, p) -> (0, p) on G2.
SelfMap retraction_s_to_zero();
/// (z1, z2, z3) -> (0, 0, z3) on the tetrablock.
SelfMap retraction_p3();

/// f^a vs f^b residual over the samples: max |f^a(x) - f^b(x)|.
double power_residual(const SelfMap& f, int a, int b, const std::vector<DomainPoint>& samples);

/// Tetrablock origin-fixing automorphism (-omega z1, -sigma z2, sigma omega z3).
SelfMap tetra_reduced_form(cplx omega, cplx sigma);

// ---------------------------------------------------------------------------
// Target sets

struct StartTarget {
  DomainPoint start;
  VerdictTag verdict = VerdictTag::Undecided;
  std::optional<TargetSetEstimate> estimate;
  /// max distance of the cluster representatives to the royal circle.
  double royal_distance = 0.0;
};

struct TargetReport {
  std::vector<StartTarget> starts;
  /// Some start is all-RoyalCircle, and all are, with a common angle.
  bool royal_propagates = true;
  /// Some start is MixedFace, and every start's unimodular factors share its angle.
  bool mixed_propagates = true;
  std::optional<double> theta;
  double max_royal_distance = 0.0;
  bool pass = true;
};

/// Throws NotDivergent unless the first start is BoundaryDivergent.
TargetReport verify_target_structure(const SelfMap& f, const std::vector<DomainPoint>& starts,
                                     const Tolerances& tol = {});

/// f(s, p) = pi_2(g(Phi_omega(s, p)), c), with g chosen so the induced disc map
/// has a boundary fixed point at conj(omega) with angular derivative 1/2.
/// Orbits accumulate at pi_2(conj(omega), c).
SelfMap mixed_face_map(cplx omega, cplx c);

// ---------------------------------------------------------------------------
// Periodic automorphisms

/// Elliptic disc automorphism with fixed point w and multiplier e^{2 pi i k / q}.
MobiusTransform elliptic_with(cplx w, int k, int q);

/// Random finite-order automorphism of `d` built from finite-order disc maps
/// (orders <= 12).
Automorphism sample_periodic_automorphism(Domain d, Rng& rng);

}  // namespace mudomains
