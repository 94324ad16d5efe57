#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mudomains/domains.hpp"

namespace mudomains {

/// splitmix64 finalizer; per-trial seeds are mix_seed(master, trial index).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** with a splitmix64-expanded seed. Bit-identical on every
/// platform, unlike the standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi_inclusive);
  bool coin(double p_true = 0.5) { return uniform() < p_true; }

 private:
  std::uint64_t s_[4];
};

/// Source of numbers in [0, 1): either Rng::uniform or successive Halton
/// coordinates.
using UniformSource = std::function<double()>;

/// Radical inverse of `index` in `base`.
double halton(std::uint64_t index, int base);

/// Uniform point in the disc of radius max_radius.
cplx sample_disc(const UniformSource& u, double max_radius);
inline cplx sample_disc(Rng& rng, double max_radius) {
  return sample_disc([&] { return rng.uniform(); }, max_radius);
}

/// a = r e^{i phi} with r = sqrt(v), v uniform on [0, max_pole^2]; rotation uniform.
MobiusTransform sample_mobius(Rng& rng, double max_pole = 0.95);

/// Interior point; coordinates driven by `u`. `radius` < 1 bounds the disc
/// radius of the underlying roots / coordinates.
DomainPoint sample_interior(Domain d, const UniformSource& u, double radius = 0.95);
DomainPoint sample_interior(Domain d, Rng& rng, double radius = 0.95);

/// `count` interior points driven by the Halton sequence (indices 1..count).
std::vector<DomainPoint> halton_interior(Domain d, int count, double radius = 0.95);

/// Disc points driven by the Halton sequence.
std::vector<cplx> halton_disc(int count, double radius);

}  // namespace mudomains
