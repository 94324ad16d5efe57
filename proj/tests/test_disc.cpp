#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mudomains/disc.hpp"
#include "mudomains/sampling.hpp"

using namespace mudomains;

namespace {

// Direct evaluation of e^{i theta} (z - a) / (1 - conj(a) z), independent of
// the library's implementation.
cplx direct(double theta, cplx a, cplx z) { return std::polar(1.0, theta) * (z - a) / (1.0 - std::conj(a) * z); }

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("mobius evaluation examples") {
  CHECK(close(MobiusTransform::identity()(cplx(0.3, 0.4)), cplx(0.3, 0.4), 1e-15));
  CHECK(close(MobiusTransform::from_paper_form(1.0, 0.0)(0.5), -0.5, 1e-15));
  CHECK(close(MobiusTransform(0.0, 0.5)(0.0), -0.5, 1e-15));
  CHECK_THROWS_AS(MobiusTransform(0.0, 1.0), Error);
}

TEST_CASE("w (z - a) / (conj(a) z - 1) converter matches the direct formula") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const cplx w = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    const cplx alpha = sample_disc(rng, 0.9);
    const cplx z = sample_disc(rng, 0.99);
    const cplx expected = w * (z - alpha) / (std::conj(alpha) * z - 1.0);
    const auto m = MobiusTransform::from_paper_form(w, alpha);
    CHECK(close(m(z), expected, 1e-12));
    CHECK(close(m.paper_omega(), w, 1e-12));
  }
}

TEST_CASE("compose and inverse agree with nested direct evaluation") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const double t1 = rng.uniform(0.0, kTwoPi), t2 = rng.uniform(0.0, kTwoPi);
    const cplx a1 = sample_disc(rng, 0.95), a2 = sample_disc(rng, 0.95);
    const MobiusTransform m1(t1, a1), m2(t2, a2);
    const auto c = compose(m1, m2);
    const auto inv = m1.inverse();
    for (int k = 0; k < 10; ++k) {
      const cplx z = sample_disc(rng, 0.99);
      CHECK(close(c(z), direct(t1, a1, direct(t2, a2, z)), 1e-10));
      CHECK(close(inv(m1(z)), z, 1e-10));
    }
    CHECK(approx_equal(compose(m1, inv), MobiusTransform::identity(), 1e-10));
  }
}

TEST_CASE("group laws: associativity on seeded pairs") {
  Rng rng(13);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = sample_mobius(rng), b = sample_mobius(rng), c = sample_mobius(rng);
    const auto left = compose(compose(a, b), c), right = compose(a, compose(b, c));
    for (int k = 0; k < 100; ++k) {
      const cplx z = sample_disc(rng, 0.9);
      worst = std::max(worst, std::abs(left(z) - right(z)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("compose with identity and involutions") {
  const MobiusTransform m(1.2, cplx(0.3, -0.2));
  CHECK(approx_equal(compose(MobiusTransform::identity(), m), m));
  const auto neg = MobiusTransform::rotation_by(kPi);
  CHECK(approx_equal(neg.inverse(), neg));
  // h(z) = (1/2 - z)/(1 - z/2) = e^{i pi} (z - 1/2)/(1 - z/2)
  const MobiusTransform h(kPi, 0.5);
  CHECK(close(h(0.0), 0.5, 1e-15));
  CHECK(approx_equal(compose(h, h), MobiusTransform::identity(), 1e-12));
}

TEST_CASE("boundary is preserved") {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const auto m = sample_mobius(rng);
    for (int k = 0; k < 256; ++k) {
      const cplx z = std::polar(1.0, kTwoPi * k / 256.0);
      CHECK(std::abs(std::abs(m(z)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("classification examples") {
  const auto neg = mobius_classify(MobiusTransform::rotation_by(kPi));
  CHECK(neg.kind == MobiusKind::Elliptic);
  REQUIRE(neg.fixed_points.size() == 1);
  CHECK(std::abs(neg.fixed_points[0]) < 1e-14);

  // (z + 1/2)/(1 + z/2) = e^{0} (z - (-1/2)) / (1 - (-1/2) z)
  const MobiusTransform h(0.0, -0.5);
  const auto hc = mobius_classify(h);
  CHECK(hc.kind == MobiusKind::Hyperbolic);
  REQUIRE(hc.fixed_points.size() == 2);
  auto fps = hc.fixed_points;
  std::sort(fps.begin(), fps.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(close(fps[0], -1.0, 1e-12));
  CHECK(close(fps[1], 1.0, 1e-12));

  CHECK(mobius_classify(MobiusTransform::identity()).kind == MobiusKind::Identity);

  // Parabolic: conjugate of a translation of the upper half plane,
  // h(z) = ((1 + i) z - i) / (i z + 1 - i) with double fixed point 1.
  // In canonical form: e^{i theta} = (1 + i)/(1 - i) * ... computed below.
  const cplx A(1, 1), B(0, -1), C(0, 1), D(1, -1);
  // e^{i theta} (z - a)/(1 - conj(a) z) = (A z + B)/(C z + D): a = -B/A, e^{i theta} = A / D.
  const cplx a = -B / A;
  const MobiusTransform p(std::arg(A / D), a);
  const auto pc = mobius_classify(p);
  CHECK(pc.kind == MobiusKind::Parabolic);
  CHECK(close(pc.fixed_points.front(), 1.0, 1e-8));
}

TEST_CASE("classified fixed points are fixed and located correctly") {
  Rng rng(15);
  for (int i = 0; i < 2000; ++i) {
    const auto m = sample_mobius(rng);
    const auto c = mobius_classify(m);
    for (cplx z : c.fixed_points) {
      CHECK(close(m(z), z, 1e-10));
      if (c.kind == MobiusKind::Elliptic) CHECK(std::abs(z) < 1.0);
      else CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("elliptic iff the orbit of 0 stays in a compact subdisc") {
  Rng rng(16);
  for (int i = 0; i < 300; ++i) {
    const auto m = sample_mobius(rng, 0.9);
    const auto kind = mobius_classify(m).kind;
    cplx z = 0.0;
    double peak = 0.0;
    for (int k = 0; k < 1000; ++k) {
      z = m(z);
      peak = std::max(peak, std::abs(z));
    }
    const bool bounded = peak < 1.0 - 1e-6;
    CHECK(bounded == (kind == MobiusKind::Elliptic));
  }
}

TEST_CASE("Denjoy-Wolff points") {
  CHECK(close(denjoy_wolff_point(MobiusTransform(0.0, -0.5)), 1.0, 1e-12));
  CHECK(close(denjoy_wolff_point(MobiusTransform(0.0, 0.5)), -1.0, 1e-12));
  CHECK_THROWS_AS(denjoy_wolff_point(MobiusTransform::rotation_by(0.3)), Error);

  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto m = sample_mobius(rng);
    if (mobius_classify(m).kind != MobiusKind::Hyperbolic) continue;
    cplx z = 0.0;
    for (int k = 0; k < 20000 && 1.0 - std::abs(z) > 1e-9; ++k) z = m(z);
    const cplx dw = denjoy_wolff_point(m);
    CHECK(std::abs(std::abs(dw) - 1.0) < 1e-12);
    CHECK(std::abs(z - dw) < 1e-3);
  }
}

TEST_CASE("algebraic period of rational rotations") {
  CHECK(algebraic_period(MobiusTransform::identity()) == 1);
  CHECK(algebraic_period(MobiusTransform::rotation_by(kTwoPi / 5)) == 5);
  CHECK(algebraic_period(MobiusTransform::rotation_by(kTwoPi * 3 / 7)) == 7);
  CHECK_FALSE(algebraic_period(MobiusTransform::rotation_by(1.0)).has_value());
  CHECK_FALSE(algebraic_period(MobiusTransform(0.0, 0.5)).has_value());
}

TEST_CASE("Blaschke products and the peak function") {
  const BlaschkeProduct b(1.0, 0.5);
  CHECK(close(b(0.5), 0.0, 1e-15));
  CHECK(close(b(0.0), 0.0, 1e-15));
  const cplx z(0.2, -0.7);
  CHECK(close(b(z), z * (z - 0.5) / (1.0 - 0.5 * z), 1e-15));
  CHECK(close(peak_function(1.0, 1.0), 1.0, 1e-15));
  CHECK(close(peak_function(1.0, -1.0), 0.0, 1e-15));

  Rng rng(18);
  for (int i = 0; i < 1000; ++i) {
    const BlaschkeProduct r(std::polar(1.0, rng.uniform(0.0, kTwoPi)), sample_disc(rng, 0.95));
    CHECK(std::abs(r(sample_disc(rng, 0.999))) < 1.0);
    const cplx w = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    const cplx u = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    if (std::abs(u - w) > 1e-6) CHECK(std::abs(peak_function(w, u)) < 1.0);
  }
}

TEST_CASE("polynomial roots") {
  const std::vector<cplx> quad{1.0, 0.0, -0.25};
  auto r = poly_roots(quad).roots;
  REQUIRE(r.size() == 2);
  CHECK(close(r[0], -0.5, 1e-14));
  CHECK(close(r[1], 0.5, 1e-14));

  const cplx z1 = 0.3, z2(0.0, 0.7);
  r = poly_roots(std::vector<cplx>{1.0, -(z1 + z2), z1 * z2}).roots;
  REQUIRE(r.size() == 2);
  CHECK(close(r[0], z2, 1e-14));
  CHECK(close(r[1], z1, 1e-14));

  r = poly_roots(std::vector<cplx>{1.0, 0.0, 0.0, 0.0}).roots;
  REQUIRE(r.size() == 3);
  for (cplx x : r) CHECK(std::abs(x) < 1e-12);

  CHECK_THROWS_AS(poly_roots(std::vector<cplx>{0.0, 1.0, 2.0}), Error);
}

TEST_CASE("poly_roots round trip on random coefficients") {
  Rng rng(19);
  for (int i = 0; i < 10000; ++i) {
    const int degree = 1 + i % 6;
    std::vector<cplx> c{1.0};
    for (int k = 0; k < degree; ++k) c.push_back(sample_disc(rng, 1.0));
    const auto res = poly_roots(c);
    REQUIRE(res.roots.size() == static_cast<std::size_t>(degree));
    double cmax = 0.0;
    for (cplx x : c) cmax = std::max(cmax, std::abs(x));
    for (cplx x : res.roots) CHECK(std::abs(poly_eval(c, x)) < 1e-10 * (1.0 + cmax));
    const auto back = poly_from_roots(res.roots);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(back[k] - c[k]) < 1e-9);
  }
}

TEST_CASE("root ordering is lexicographic and deterministic") {
  const std::vector<cplx> roots{cplx(0.5, 0.1), cplx(-0.2, 0.3), cplx(-0.2, -0.3), cplx(0.1, 0.0)};
  const auto c = poly_from_roots(roots);
  const auto a = poly_roots(c).roots, b = poly_roots(c).roots;
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(a[k] == b[k]);
  for (std::size_t k = 1; k < 4; ++k)
    CHECK((a[k - 1].real() < a[k].real() - 1e-12 ||
           (std::abs(a[k - 1].real() - a[k].real()) <= 1e-12 && a[k - 1].imag() <= a[k].imag())));
}
