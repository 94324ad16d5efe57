#include "mudomains/sampling.hpp"

#include <array>
#include <cmath>

namespace mudomains {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  for (int i = 0; i < 4; ++i) s_[i] = mix_seed(seed, static_cast<std::uint64_t>(i));
}

std::uint64_t Rng::next() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int Rng::uniform_int(int lo, int hi_inclusive) {
  const auto span = static_cast<std::uint64_t>(hi_inclusive - lo + 1);
  return lo + static_cast<int>(next() % span);
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

cplx sample_disc(const UniformSource& u, double max_radius) {
  const double r = max_radius * std::sqrt(u());
  return std::polar(r, kTwoPi * u());
}

MobiusTransform sample_mobius(Rng& rng, double max_pole) {
  const double r = std::sqrt(rng.uniform(0.0, max_pole * max_pole));
  const double phi = rng.uniform(0.0, kTwoPi);
  const double theta = rng.uniform(0.0, kTwoPi);
  return {theta, std::polar(r, phi)};
}

DomainPoint sample_interior(Domain d, const UniformSource& u, double radius) {
  switch (d) {
    case Domain::G2: {
      const cplx z1 = sample_disc(u, radius), z2 = sample_disc(u, radius);
      return to_domain_point(symmetrize2(z1, z2));
    }
    case Domain::G3: {
      const cplx z1 = sample_disc(u, radius), z2 = sample_disc(u, radius), z3 = sample_disc(u, radius);
      return to_domain_point(symmetrize3(z1, z2, z3));
    }
    case Domain::Tetra: {
      for (;;) {
        const cplx x1 = sample_disc(u, radius), x2 = sample_disc(u, radius);
        const double room = (1.0 - std::norm(x1)) * (1.0 - std::abs(x2));
        const TetraPoint x{x1, x2, x1 * x2 + sample_disc(u, room)};
        if (tetra_membership(x).margin > 0.0) return to_domain_point(x);
      }
    }
    case Domain::Penta: {
      const cplx z1 = sample_disc(u, radius), z2 = sample_disc(u, radius);
      const auto sp = symmetrize2(z1, z2);
      const double bound = penta_bound(sp.s, sp.p, BetaVariant::Literature);
      const cplx a = sample_disc(u, radius * bound);
      return to_domain_point(PentaPoint{a, sp.s, sp.p});
    }
  }
  return {};
}

DomainPoint sample_interior(Domain d, Rng& rng, double radius) {
  return sample_interior(d, [&] { return rng.uniform(); }, radius);
}

namespace {

constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

// Consumes successive Halton coordinates of one index; rejection loops wrap
// onto later indices so the stream never repeats a coordinate.
struct HaltonStream {
  std::uint64_t index;
  std::size_t dim = 0;
  double operator()() {
    const std::size_t k = dim++;
    return halton(index + 7919ULL * (k / kPrimes.size()), kPrimes[k % kPrimes.size()]);
  }
};

}  // namespace

std::vector<DomainPoint> halton_interior(Domain d, int count, double radius) {
  std::vector<DomainPoint> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) {
    HaltonStream stream{static_cast<std::uint64_t>(i)};
    out.push_back(sample_interior(d, std::ref(stream), radius));
  }
  return out;
}

std::vector<cplx> halton_disc(int count, double radius) {
  std::vector<cplx> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) {
    const double r = radius * std::sqrt(halton(i, 2));
    out.push_back(std::polar(r, kTwoPi * halton(i, 3)));
  }
  return out;
}

}  // namespace mudomains
