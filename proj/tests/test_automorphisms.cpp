#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mudomains/automorphisms.hpp"
#include "mudomains/sampling.hpp"

using namespace mudomains;

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) < tol; }

// The form w (z - alpha) / (conj(alpha) z - 1), evaluated directly.
cplx paper_eval(cplx w, cplx alpha, cplx z) { return w * (z - alpha) / (std::conj(alpha) * z - 1.0); }

double dist(const DomainPoint& a, const DomainPoint& b) { return max_dist(a, b); }

TetraAut random_word(Rng& rng) {
  TetraAut t;
  const int len = rng.uniform_int(1, 6);
  for (int i = 0; i < len; ++i) {
    const int k = rng.uniform_int(0, 2);
    if (k == 0) t.word.push_back(TetraL{sample_mobius(rng)});
    else if (k == 1) t.word.push_back(TetraR{sample_mobius(rng)});
    else t.word.push_back(TetraF{});
  }
  return t;
}

Automorphism random_aut(Domain d, Rng& rng) {
  switch (d) {
    case Domain::G2: return GnAut{2, sample_mobius(rng)};
    case Domain::G3: return GnAut{3, sample_mobius(rng)};
    case Domain::Tetra: return random_word(rng);
    case Domain::Penta: return PentaAut{std::polar(1.0, rng.uniform(0.0, kTwoPi)), sample_mobius(rng)};
  }
  return GnAut{};
}

}  // namespace

TEST_CASE("G_n lifts: examples") {
  const GnAut neg{2, MobiusTransform::rotation_by(kPi)};
  auto r = gn_apply(neg, SymPoint2{0.5, 0.1});
  CHECK(close(r.s, -0.5, 1e-15));
  CHECK(close(r.p, 0.1, 1e-15));

  const GnAut h3{3, MobiusTransform(0.0, -0.5)};
  const auto r3 = gn_apply(h3, SymPoint3{0.0, 0.0, 0.0});
  CHECK(close(r3.s1, 1.5, 1e-14));
  CHECK(close(r3.s2, 0.75, 1e-14));
  CHECK(close(r3.s3, 0.125, 1e-14));

  CHECK_THROWS_AS(gn_apply(neg, SymPoint2{3.0, 0.0}), Error);
}

TEST_CASE("G_n lifts agree with root-wise application") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto h = sample_mobius(rng);
    const cplx z1 = sample_disc(rng, 0.95), z2 = sample_disc(rng, 0.95), z3 = sample_disc(rng, 0.95);
    const auto a = gn_apply(GnAut{2, h}, symmetrize2(z1, z2));
    const auto ea = symmetrize2(h(z1), h(z2));
    CHECK(close(a.s, ea.s, 1e-10));
    CHECK(close(a.p, ea.p, 1e-10));
    const auto b = gn_apply(GnAut{3, h}, symmetrize3(z1, z2, z3));
    const auto eb = symmetrize3(h(z1), h(z2), h(z3));
    CHECK(close(b.s1, eb.s1, 1e-10));
    CHECK(close(b.s2, eb.s2, 1e-10));
    CHECK(close(b.s3, eb.s3, 1e-10));
  }
}

TEST_CASE("royal points stay royal") {
  Rng rng(32);
  for (int i = 0; i < 2000; ++i) {
    const auto h = sample_mobius(rng);
    const cplx z = sample_disc(rng, 0.99);
    const auto r = gn_apply(GnAut{2, h}, symmetrize2(z, z));
    CHECK(std::abs(r.s * r.s - 4.0 * r.p) < 1e-10);
  }
}

TEST_CASE("tetrablock generators: examples") {
  const auto f = tetra_F({0.1, 0.2, 0.3});
  CHECK(close(f.x1, 0.2, 1e-15));
  CHECK(close(f.x2, 0.1, 1e-15));
  CHECK(close(f.x3, 0.3, 1e-15));

  const cplx w = std::polar(1.0, 0.9), sigma = std::polar(1.0, -2.1);
  const TetraPoint x{cplx(0.2, 0.1), cplx(-0.3, 0.2), cplx(0.05, -0.1)};
  const auto nu = MobiusTransform::from_paper_form(w, 0.0);
  const auto chi = MobiusTransform::from_paper_form(sigma, 0.0);
  auto y = tetra_L(nu, x);
  CHECK(close(y.x1, -w * x.x1, 1e-15));
  CHECK(close(y.x2, x.x2, 1e-15));
  CHECK(close(y.x3, -w * x.x3, 1e-15));

  y = tetra_apply(TetraAut{{TetraL{nu}, TetraR{chi}}}, x);
  CHECK(close(y.x1, -w * x.x1, 1e-15));
  CHECK(close(y.x2, -sigma * x.x2, 1e-15));
  CHECK(close(y.x3, sigma * w * x.x3, 1e-15));

  y = tetra_apply(TetraAut{}, x);
  CHECK(dist(to_domain_point(y), to_domain_point(x)) == 0.0);

  const auto minus = MobiusTransform::from_paper_form(-1.0, 0.0);
  y = tetra_apply(TetraAut{{TetraL{minus}, TetraR{minus}}}, x);
  CHECK(dist(to_domain_point(y), to_domain_point(x)) < 1e-15);
}

TEST_CASE("L and R act on the triangular set through their disc maps") {
  Rng rng(33);
  for (int i = 0; i < 500; ++i) {
    const auto nu = sample_mobius(rng), chi = sample_mobius(rng);
    const cplx a = sample_disc(rng, 0.95), b = sample_disc(rng, 0.95);
    const TetraPoint x{a, b, a * b};
    const auto l = tetra_L(nu, x);
    CHECK(close(l.x1, paper_eval(nu.paper_omega(), nu.paper_alpha(), a), 1e-10));
    CHECK(close(l.x2, b, 1e-10));
    const auto r = tetra_R(chi, x);
    CHECK(close(r.x1, a, 1e-10));
    // b -> (conj(beta) - sigma b) / (1 - sigma beta b)
    const cplx sigma = chi.paper_omega(), beta = chi.paper_alpha();
    CHECK(close(r.x2, (std::conj(beta) - sigma * b) / (1.0 - sigma * beta * b), 1e-10));
    CHECK(close(r.x2, tetra_R_on_triangle(chi)(b), 1e-10));
  }
}

TEST_CASE("triangular invariance under words") {
  Rng rng(34);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_word(rng);
    const cplx a = sample_disc(rng, 0.95), b = sample_disc(rng, 0.95);
    const auto y = tetra_apply(t, {a, b, a * b});
    worst = std::max(worst, std::abs(y.x3 - y.x1 * y.x2));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("word inverse and composition") {
  Rng rng(35);
  for (int i = 0; i < 500; ++i) {
    const auto f = random_word(rng), g = random_word(rng);
    const auto x = as_tetra(sample_interior(Domain::Tetra, rng, 0.9));
    const auto back = tetra_apply(tetra_invert(f), tetra_apply(f, x));
    CHECK(dist(to_domain_point(back), to_domain_point(x)) < 1e-10);
    const auto fg = tetra_apply(tetra_compose(f, g), x);
    const auto nested = tetra_apply(f, tetra_apply(g, x));
    CHECK(dist(to_domain_point(fg), to_domain_point(nested)) < 1e-10);
  }
}

TEST_CASE("pentablock automorphisms: examples") {
  const PentaAut f{1.0, MobiusTransform(0.0, -0.5)};
  auto y = penta_apply(f, {0.0, 0.0, 0.0});
  CHECK(close(y.a, 0.0, 1e-15));
  CHECK(close(y.s, 1.0, 1e-15));
  CHECK(close(y.p, 0.25, 1e-15));

  const PentaAut id{1.0, MobiusTransform::identity()};
  const PentaPoint x{cplx(0.1, 0.2), cplx(0.3, -0.1), cplx(0.05, 0.02)};
  y = penta_apply(id, x);
  CHECK(dist(to_domain_point(y), to_domain_point(x)) < 1e-15);

  Rng rng(36);
  for (int i = 0; i < 200; ++i) {
    MobiusTransform g;
    do g = sample_mobius(rng);
    while (mobius_classify(g).kind != MobiusKind::Elliptic);
    const cplx z0 = mobius_classify(g).fixed_points.front();
    const PentaPoint fixed{0.0, 2.0 * z0, z0 * z0};
    y = penta_apply(PentaAut{std::polar(1.0, rng.uniform(0.0, kTwoPi)), g}, fixed);
    CHECK(dist(to_domain_point(y), to_domain_point(fixed)) < 1e-10);
  }
}

TEST_CASE("pentablock (s, p) part equals the G2 lift") {
  Rng rng(37);
  for (int i = 0; i < 2000; ++i) {
    const PentaAut f{std::polar(1.0, rng.uniform(0.0, kTwoPi)), sample_mobius(rng)};
    const auto x = as_penta(sample_interior(Domain::Penta, rng, 0.9));
    const auto y = penta_apply(f, x);
    const auto g = gn_apply(GnAut{2, f.gamma}, SymPoint2{x.s, x.p});
    CHECK(close(y.s, g.s, 1e-12));
    CHECK(close(y.p, g.p, 1e-12));
  }
}

TEST_CASE("group laws on every domain") {
  Rng rng(38);
  for (Domain d : {Domain::G2, Domain::G3, Domain::Tetra, Domain::Penta}) {
    CAPTURE(to_string(d));
    double worst_trip = 0.0, worst_margin = 1.0;
    for (int i = 0; i < 10000; ++i) {
      const auto f = random_aut(d, rng);
      const auto x = sample_interior(d, rng, 0.9);
      const auto y = mudomains::apply(f, x);
      worst_margin = std::min(worst_margin, orbit_margin(y));
      worst_trip = std::max(worst_trip, max_dist(mudomains::apply(inverse(f), y), x));
    }
    CHECK(worst_trip < 1e-10);
    CHECK(worst_margin > 0.0);
  }
}

TEST_CASE("periodicity detection") {
  const auto probes = halton_interior(Domain::G2, 6, 0.9);
  CHECK(periodicity_detect(GnAut{2, MobiusTransform::rotation_by(kTwoPi / 5)}, probes) == 5);
  CHECK(periodicity_detect(GnAut{2, MobiusTransform::rotation_by(kPi)}, probes) == 2);
  CHECK_FALSE(periodicity_detect(GnAut{2, MobiusTransform(0.0, -0.5)}, probes).has_value());
  CHECK_FALSE(periodicity_detect(GnAut{2, MobiusTransform::rotation_by(1.0)}, probes).has_value());
  // Conjugating a rotation keeps its period.
  const MobiusTransform phi(0.4, cplx(0.3, -0.2));
  const auto conj = compose(phi.inverse(), compose(MobiusTransform::rotation_by(kTwoPi / 7), phi));
  CHECK(periodicity_detect(GnAut{2, conj}, probes) == 7);

  const auto tp = halton_interior(Domain::Tetra, 6, 0.9);
  const auto i4 = MobiusTransform::from_paper_form(cplx(0.0, 1.0), 0.0);
  CHECK(periodicity_detect(TetraAut{{TetraL{i4}}}, tp) == 4);
  CHECK(periodicity_detect(TetraAut{{TetraF{}}}, tp) == 2);
}
