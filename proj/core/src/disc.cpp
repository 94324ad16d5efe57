#include "mudomains/disc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mudomains {

namespace {

// Fixed-point equation conj(a) z^2 + (u - 1) z - u a = 0 of z -> u (z - a)/(1 - conj(a) z).
constexpr double kIdentityTol = 1e-13;

}  // namespace

MobiusTransform::MobiusTransform(double rotation, cplx pole)
    : rotation_(wrap_angle(rotation)), pole_(pole) {
  if (!(std::abs(pole) < 1.0)) {
    std::ostringstream os;
    os << "pole " << pole << " is not inside the unit disc";
    throw Error(ErrorCode::PoleOnBoundary, os.str());
  }
}

MobiusTransform MobiusTransform::from_paper_form(cplx omega, cplx alpha) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "omega must be unimodular");
  return {std::arg(-omega), alpha};
}

cplx MobiusTransform::apply(cplx z) const {
  if (!(std::abs(pole_) < 1.0)) throw Error(ErrorCode::PoleOnBoundary, "corrupted transform");
  return unimodular() * (z - pole_) / (1.0 - std::conj(pole_) * z);
}

cplx MobiusTransform::derivative(cplx z) const {
  const cplx den = 1.0 - std::conj(pole_) * z;
  return unimodular() * (1.0 - std::norm(pole_)) / (den * den);
}

MobiusTransform MobiusTransform::inverse() const {
  // z = e^{-i theta} (w + a e^{i theta}) / (1 + conj(a) e^{-i theta} w)
  return {-rotation_, -pole_ * unimodular()};
}

MobiusTransform compose(const MobiusTransform& outer, const MobiusTransform& inner) {
  // Matrices [u, -u a; -conj(a), 1].
  const cplx u1 = outer.unimodular(), a1 = outer.pole();
  const cplx u2 = inner.unimodular(), a2 = inner.pole();
  const cplx A = u1 * u2 + u1 * a1 * std::conj(a2);
  const cplx B = -u1 * u2 * a2 - u1 * a1;
  const cplx D = std::conj(a1) * u2 * a2 + 1.0;
  cplx pole = -B / A;
  // Rounding can put |pole| a hair above a value < 1 but never near 1 for valid inputs.
  return {std::arg(A / D), pole};
}

bool approx_equal(const MobiusTransform& a, const MobiusTransform& b, double tol) {
  return std::abs(angle_diff(a.rotation(), b.rotation())) <= tol &&
         std::abs(a.pole() - b.pole()) <= tol;
}

MobiusClass mobius_classify(const MobiusTransform& m) {
  const cplx u = m.unimodular();
  const cplx a = m.pole();
  MobiusClass out;
  if (std::abs(u - 1.0) < kIdentityTol && std::abs(a) < kIdentityTol) {
    out.kind = MobiusKind::Identity;
    return out;
  }
  if (std::abs(a) < kIdentityTol) {
    out.kind = MobiusKind::Elliptic;
    out.fixed_points = {0.0};
    return out;
  }
  // Discriminant (u-1)^2 + 4|a|^2 u = 4u (|a|^2 - sin^2(theta/2)).
  const double half_sin = std::sin(0.5 * m.rotation());
  const double delta = std::norm(a) - half_sin * half_sin;
  const cplx ca = std::conj(a);
  if (4.0 * std::abs(delta) < kParabolicTol) {
    cplx z = (1.0 - u) / (2.0 * ca);
    out.kind = MobiusKind::Parabolic;
    out.fixed_points = {z / std::abs(z)};
    return out;
  }
  const cplx coeffs[3] = {ca, u - 1.0, -u * a};
  auto roots = poly_roots(coeffs).roots;
  if (delta < 0.0) {
    out.kind = MobiusKind::Elliptic;
    cplx inner = std::abs(roots[0]) < std::abs(roots[1]) ? roots[0] : roots[1];
    // One Newton polish on m(z) - z.
    const cplx g = m.apply(inner) - inner;
    const cplx dg = m.derivative(inner) - 1.0;
    if (std::abs(dg) > 1e-300) {
      cplx polished = inner - g / dg;
      if (std::abs(m.apply(polished) - polished) < std::abs(g)) inner = polished;
    }
    out.fixed_points = {inner};
  } else {
    out.kind = MobiusKind::Hyperbolic;
    out.fixed_points = {roots[0] / std::abs(roots[0]), roots[1] / std::abs(roots[1])};
  }
  return out;
}

cplx denjoy_wolff_point(const MobiusTransform& m) {
  const auto cls = mobius_classify(m);
  switch (cls.kind) {
    case MobiusKind::Identity:
    case MobiusKind::Elliptic:
      throw Error(ErrorCode::HasInteriorFixedPoint, "map fixes a point of the disc");
    case MobiusKind::Parabolic:
      return cls.fixed_points.front();
    case MobiusKind::Hyperbolic: {
      const cplx p = cls.fixed_points[0], q = cls.fixed_points[1];
      return std::abs(m.derivative(p)) < std::abs(m.derivative(q)) ? p : q;
    }
  }
  return {};
}

std::optional<int> algebraic_period(const MobiusTransform& m, int max_period, double tol) {
  const auto cls = mobius_classify(m);
  if (cls.kind == MobiusKind::Identity) return 1;
  if (cls.kind != MobiusKind::Elliptic) return std::nullopt;
  const cplx lambda = m.derivative(cls.fixed_points.front());
  const double phi = std::arg(lambda);
  for (int q = 1; q <= max_period; ++q) {
    if (std::abs(std::polar(1.0, q * phi) - 1.0) < tol) return q;
  }
  return std::nullopt;
}

BlaschkeProduct::BlaschkeProduct(cplx omega) : degree_(1), omega_(omega) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "Blaschke factor must be unimodular");
}

BlaschkeProduct::BlaschkeProduct(cplx omega, cplx second_zero)
    : degree_(2), omega_(omega), zero_(second_zero) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "Blaschke factor must be unimodular");
  if (!(std::abs(second_zero) < 1.0))
    throw Error(ErrorCode::InvalidArgument, "Blaschke zeros must lie in the disc");
}

std::vector<cplx> BlaschkeProduct::zeros() const {
  if (degree_ == 1) return {0.0};
  return {0.0, zero_};
}

cplx BlaschkeProduct::apply(cplx z) const {
  if (degree_ == 1) return omega_ * z;
  return omega_ * z * (z - zero_) / (1.0 - std::conj(zero_) * z);
}

cplx apply(const DiscAtom& atom, cplx z) {
  return std::visit(
      [z](const auto& a) -> cplx {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, DiscScale>) {
          return a.factor * z;
        } else {
          return a.apply(z);
        }
      },
      atom);
}

cplx DiscWord::apply(cplx z) const {
  for (const auto& a : atoms) z = mudomains::apply(a, z);
  return z;
}

bool DiscWord::is_automorphism() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const DiscAtom& a) {
    if (std::holds_alternative<MobiusTransform>(a)) return true;
    if (const auto* b = std::get_if<BlaschkeProduct>(&a)) return b->degree() == 1;
    return std::abs(std::abs(std::get<DiscScale>(a).factor) - 1.0) < 1e-15;
  });
}

cplx peak_function(cplx omega, cplx z) { return 0.5 * (1.0 + std::conj(omega) * z); }

cplx blaschke_apply(const BlaschkeProduct& b, cplx z) { return b.apply(z); }

cplx mobius_apply(const MobiusTransform& m, cplx z) { return m.apply(z); }

// ---------------------------------------------------------------------------
// Polynomial roots

cplx poly_eval(std::span<const cplx> c, cplx z) {
  cplx acc = 0.0;
  for (const cplx& v : c) acc = acc * z + v;
  return acc;
}

std::vector<cplx> poly_from_roots(std::span<const cplx> roots) {
  std::vector<cplx> c{1.0};
  for (const cplx& r : roots) {
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  return c;
}

namespace {

void sort_roots(std::vector<cplx>& roots) {
  auto key = [](cplx z) {
    return std::pair{std::llround(z.real() * 1e12), std::llround(z.imag() * 1e12)};
  };
  std::stable_sort(roots.begin(), roots.end(),
                   [&](cplx a, cplx b) { return key(a) < key(b); });
}

std::vector<cplx> derivative_coeffs(std::span<const cplx> c) {
  const std::size_t n = c.size() - 1;
  std::vector<cplx> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = c[i] * static_cast<double>(n - i);
  return d;
}

// Newton polish that only accepts steps reducing the residual.
cplx polish(std::span<const cplx> c, std::span<const cplx> dc, cplx z, int steps) {
  double res = std::abs(poly_eval(c, z));
  for (int k = 0; k < steps && res > 0.0; ++k) {
    const cplx d = poly_eval(dc, z);
    if (d == cplx(0.0)) break;
    const cplx next = z - poly_eval(c, z) / d;
    const double r = std::abs(poly_eval(c, next));
    if (!(r < res)) break;
    z = next;
    res = r;
  }
  return z;
}

std::vector<cplx> solve_quadratic(cplx b, cplx c) {
  // z^2 + b z + c
  const cplx sq = std::sqrt(b * b - 4.0 * c);
  const cplx q = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
  if (q == cplx(0.0)) return {0.0, 0.0};
  return {q, c / q};
}

std::vector<cplx> solve_cubic(cplx a, cplx b, cplx c) {
  // z^3 + a z^2 + b z + c, depressed with z = t - a/3.
  const cplx p = b - a * a / 3.0;
  const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  const cplx alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  std::vector<cplx> out;
  if (u3 == cplx(0.0)) {
    out = {-a / 3.0, -a / 3.0, -a / 3.0};
    return out;
  }
  const cplx u = std::pow(u3, 1.0 / 3.0);
  const cplx w = std::polar(1.0, kTwoPi / 3.0);
  cplx uk = u;
  for (int k = 0; k < 3; ++k) {
    const cplx v = -p / (3.0 * uk);
    out.push_back(uk + v - a / 3.0);
    uk *= w;
  }
  return out;
}

std::vector<cplx> aberth(std::span<const cplx> c, const RootOptions& opts) {
  const std::size_t n = c.size() - 1;
  const auto dc = derivative_coeffs(c);
  // Initial radius from the Cauchy-type bound on the monic polynomial.
  double radius = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    radius = std::max(radius, std::pow(std::abs(c[i] / c[0]), 1.0 / static_cast<double>(i)));
  radius = std::max(radius, 1e-3);
  const cplx centre = -c[1] / (c[0] * static_cast<double>(n));
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k)
    z[k] = centre + std::polar(radius, kTwoPi * static_cast<double>(k) / static_cast<double>(n) + 0.4);

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx pk = poly_eval(c, z[k]);
      if (pk == cplx(0.0)) continue;
      const cplx ratio = pk / poly_eval(dc, z[k]);
      cplx sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < opts.tolerance) {
      for (auto& r : z) r = polish(c, dc, r, 2);
      return z;
    }
  }
  throw Error(ErrorCode::DidNotConverge, "Aberth iteration exceeded the sweep limit");
}

}  // namespace

PolyRoots poly_roots(std::span<const cplx> coefficients, const RootOptions& opts) {
  if (coefficients.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  if (coefficients[0] == cplx(0.0))
    throw Error(ErrorCode::ZeroLeadingCoefficient, "leading coefficient is zero");
  PolyRoots out;
  out.coefficients.assign(coefficients.begin(), coefficients.end());
  const std::size_t n = coefficients.size() - 1;
  const cplx lead = coefficients[0];
  switch (n) {
    case 0:
      break;
    case 1:
      out.roots = {-coefficients[1] / lead};
      break;
    case 2:
      out.roots = solve_quadratic(coefficients[1] / lead, coefficients[2] / lead);
      break;
    case 3: {
      out.roots = solve_cubic(coefficients[1] / lead, coefficients[2] / lead,
                              coefficients[3] / lead);
      const auto dc = derivative_coeffs(coefficients);
      for (auto& r : out.roots) r = polish(coefficients, dc, r, 3);
      break;
    }
    default:
      out.roots = aberth(coefficients, opts);
  }
  sort_roots(out.roots);
  return out;
}

}  // namespace mudomains
