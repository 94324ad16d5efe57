#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mudomains/automorphisms.hpp"

namespace mudomains {

/// Every numerical threshold used by the iteration layer and the theorem lab.
/// Reports echo the full record.
struct Tolerances {
  int n_max = 5000;
  double stop_displacement = 1e-13;
  double stop_margin = 1e-12;
  /// Final displacement and margin required for a converged fixed point.
  double fixed_displacement = 1e-11;
  double fixed_margin = 1e-6;
  double fixed_residual = 1e-9;
  double newton_residual = 1e-12;
  double newton_step = 1e-6;
  /// Relative singular-value cutoff of the Newton pseudo-inverse.
  double newton_rank = 1e-10;
  double periodic_return = 1e-9;
  /// Minimum spread of a cycle; smaller cycles are treated as converged.
  double periodic_spread = 1e-6;
  double boundary = 1e-4;
  /// Allowed upward jitter of the margin moving average (root-margin noise).
  double monotone_slack = 1e-8;
  /// G3 root margins carry cube-root conditioning near the boundary.
  double monotone_slack_g3 = 1e-5;
  double target_margin = 1e-3;
  double cluster_eps = 1e-2;
  double unimodular = 1e-4;
  double angle = 1e-3;
  /// Negative margin an atom image may have before AtomRangeViolation.
  double atom_range = 5e-5;
  double retraction = 1e-10;
  double sample_residual = 1e-9;
  double curve = 1e-8;
};

/// (name, value) pairs in declaration order; used for config echo and the
/// --tol-<name> overrides.
std::vector<std::pair<std::string, double>> tolerance_fields(const Tolerances& tol);
/// Returns false for unknown names.
bool set_tolerance(Tolerances& tol, std::string_view name, double value);

// ---------------------------------------------------------------------------
// Self-maps

/// Holomorphic functional from a domain into the disc.
enum class OutboundKind {
  HalfS,     ///< s/2 (G2), s/2 of the (s, p) part (Penta)
  P,         ///< p (G2, Penta)
  Phi,       ///< Phi_omega (G2, Penta)
  ThirdS1,   ///< s1/3 (G3)
  S3,        ///< s3 (G3)
  X1,        ///< tetrablock coordinates
  X2,
  X3,
  PentaA,    ///< a (Penta)
};

struct Outbound {
  OutboundKind kind = OutboundKind::HalfS;
  cplx omega = 1.0;  ///< used by Phi
};

/// Holomorphic disc embedding into a domain.
enum class InboundKind {
  Form1,       ///< lambda -> pi_2(B(sqrt l), B(-sqrt l))  (G2)
  Form2,       ///< lambda -> pi_2(l, a(l))                (G2)
  PairWith,    ///< lambda -> pi_2(l, c1)                  (G2)
  AxisP,       ///< lambda -> (0, l)                       (G2)
  TripleWith,  ///< lambda -> pi_3(l, c1, c2)              (G3)
  AxisS3,      ///< lambda -> (0, 0, l)                    (G3)
  Triangular,  ///< lambda -> (l, c1, l c1)                (Tetra)
  Axis1,       ///< (l, 0, 0)                              (Tetra)
  Axis2,       ///< (0, l, 0)                              (Tetra)
  Axis3,       ///< (0, 0, l)                              (Tetra)
  PentaBase,   ///< lambda -> (0, pi_2(l, c1))             (Penta)
  PentaAxisA,  ///< lambda -> (l, 0, 0)                    (Penta)
};

struct Inbound {
  InboundKind kind = InboundKind::AxisP;
  BlaschkeProduct blaschke;  ///< Form1
  MobiusTransform mobius;    ///< Form2
  cplx c1 = 0.0;
  cplx c2 = 0.0;
};

/// pi_n(z_1, ..., z_n) -> pi_n(g(z_1), ..., g(z_n)).
struct SymLift {
  DiscWord g;
};

/// inbound o g o outbound.
struct DiscRoute {
  Outbound out;
  DiscWord g;
  Inbound in;
};

struct Constant {
  DomainPoint value;
};

using MapAtom = std::variant<Automorphism, SymLift, DiscRoute, Constant>;

/// Composition chain; atoms act first to last.
struct SelfMap {
  Domain domain = Domain::G2;
  std::vector<MapAtom> atoms;
};

/// Validates atom/domain compatibility and samples 10^3 points per atom
/// (SymLift: |g| < 1 on disc samples; DiscRoute: outbound lands in the disc
/// on interior samples, inbound lands inside on disc samples; Constant inside).
/// Throws InvalidSelfMap.
SelfMap make_self_map(Domain domain, std::vector<MapAtom> atoms);
SelfMap identity_map(Domain domain);

cplx outbound_apply(const Outbound& out, const DomainPoint& pt);
DomainPoint inbound_apply(Domain domain, const Inbound& in, cplx lambda);

/// Raw evaluation without range checks (also used for finite differences).
DomainPoint evaluate(const SelfMap& f, const DomainPoint& z);

/// Checked evaluation: throws PointOutsideDomain if z is outside and
/// AtomRangeViolation (message names the atom index) if an atom image has
/// margin below -atom_range.
DomainPoint self_map_apply(const SelfMap& f, const DomainPoint& z, const Tolerances& tol = {});

/// True if every atom is an automorphism.
bool is_automorphism(const SelfMap& f);
/// The automorphism the chain composes to, when it has exactly one atom.
std::optional<Automorphism> single_automorphism(const SelfMap& f);

// ---------------------------------------------------------------------------
// Orbits

struct OrbitRecord {
  DomainPoint start;
  /// points[0] = start.
  std::vector<DomainPoint> points;
  std::vector<double> margins;
  /// displacements[k] = |points[k+1] - points[k]| (max-norm).
  std::vector<double> displacements;

  enum class Stop { MaxSteps, Converged, Boundary };
  Stop stop = Stop::MaxSteps;
};

std::string_view to_string(OrbitRecord::Stop s);

/// Iterates up to tol.n_max steps; stops early on displacement < stop_displacement
/// or margin < stop_margin. Deterministic given (f, z0, tol).
OrbitRecord iterate(const SelfMap& f, const DomainPoint& z0, const Tolerances& tol = {});

enum class VerdictTag {
  ConvergedFixedPoint,
  Periodic,
  BoundaryDivergent,
  /// Bounded orbit that neither converged nor cycled, while Newton located an
  /// interior fixed point (irrational rotations and slow contractions).
  BoundedWithFixedPoint,
  Undecided,
};

std::string_view to_string(VerdictTag t);

struct OrbitVerdict {
  VerdictTag tag = VerdictTag::Undecided;
  /// Fixed point for ConvergedFixedPoint and BoundedWithFixedPoint.
  std::optional<DomainPoint> fixed_point;
  int period = 0;
  std::vector<DomainPoint> cycle;
  /// Tail cluster representatives for BoundaryDivergent.
  std::vector<DomainPoint> tail_clusters;
  double final_margin = 0.0;
  double final_displacement = 0.0;

  /// Fixed point, cycle or bounded-with-fixed-point.
  bool non_divergent() const {
    return tag == VerdictTag::ConvergedFixedPoint || tag == VerdictTag::Periodic ||
           tag == VerdictTag::BoundedWithFixedPoint;
  }
};

OrbitVerdict classify_orbit(const OrbitRecord& record, const SelfMap& f, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Newton

enum class NewtonStatus { Converged, Diverged, Singular, StepOutOfDomain, EvaluationFailed };
std::string_view to_string(NewtonStatus s);

struct NewtonResult {
  NewtonStatus status = NewtonStatus::Diverged;
  DomainPoint point;
  double residual = 0.0;
  int iterations = 0;

  bool ok() const { return status == NewtonStatus::Converged; }
};

/// Newton on F = f - id with a central-difference complex Jacobian and a
/// truncated-SVD minimum-norm step, so non-isolated fixed sets are reachable.
NewtonResult newton_solve(const SelfMap& f, const DomainPoint& start, int max_iter = 50,
                          const Tolerances& tol = {});

std::optional<DomainPoint> newton_fixed_point(const SelfMap& f, const DomainPoint& start,
                                              int max_iter = 50, const Tolerances& tol = {});

/// Max-norm |f(z) - z|.
double fixed_residual(const SelfMap& f, const DomainPoint& z);

// ---------------------------------------------------------------------------
// Target sets (G2 only)

struct TargetCluster {
  SymPoint2 representative;
  int multiplicity = 0;
  std::array<cplx, 2> factors{};
  double margin = 0.0;
};

enum class TargetClass { RoyalCircle, MixedFace, Other };
std::string_view to_string(TargetClass c);

struct TargetSetEstimate {
  std::vector<TargetCluster> clusters;
  TargetClass classification = TargetClass::Other;
  /// RoyalCircle: one angle per cluster. MixedFace: the common angle.
  std::vector<double> thetas;
  /// MixedFace: index (0 or 1) of the unimodular factor per cluster.
  std::vector<int> unimodular_factor;
};

/// Clusters the orbit tail (after burn_in steps, margin < target_margin) and
/// classifies the factorizations. A negative burn_in skips the first half of
/// the orbit. Throws NotDivergent unless the orbit is BoundaryDivergent,
/// InvalidArgument for non-G2 maps.
TargetSetEstimate target_set_estimate(const SelfMap& f, const DomainPoint& z0, int burn_in = -1,
                                      const Tolerances& tol = {});
TargetSetEstimate target_set_from_orbit(const OrbitRecord& record, int burn_in, const Tolerances& tol);

}  // namespace mudomains
