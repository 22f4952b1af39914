#pragma once

#include "reflectlab/path.hpp"
#include "reflectlab/stopping.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>

namespace reflectlab {

/// Independent 64-bit stream key for (seed, index, stream); counter-based so
/// draws need no shared generator state.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

/// Brownian motion on a uniform grid: Gaussian increments of variance dt.
struct BrownianLaw {
  double dt = 1e-3;
  double horizon = 10.0;
};

/// beta(clock(t)) with beta Brownian and clock an independent nondecreasing
/// continuous time change.
struct OconeLaw {
  enum class Clock {
    Identity,    ///< clock(t) = t
    RandomRate,  ///< piecewise-linear, rate exp(Z_k) on [k, k+1)
    RandomStop,  ///< clock(t) = min(t, U), U uniform on (0, horizon)
  };
  Clock clock = Clock::Identity;
  double dt = 1e-3;
  double horizon = 10.0;
};

/// M_t = t xi on [0,1], xi + (t-1) eta afterwards; xi, eta independent signs.
struct CounterexampleLaw {
  double horizon = 10.0;
};

/// A symmetric process frozen once |X| reaches `level`.
struct StoppedSymmetricLaw {
  enum class Mode {
    Brownian,  ///< Brownian motion until the freeze
    Ramp,      ///< xi * t until the freeze (symmetric, not a martingale)
  };
  double level = 1.0;
  Mode mode = Mode::Brownian;
  double dt = 1e-3;
  double horizon = 10.0;
};

/// Brownian motion plus drift * t.
struct DriftedLaw {
  double drift = 0.5;
  double dt = 1e-3;
  double horizon = 10.0;
};

using Law = std::variant<BrownianLaw, OconeLaw, CounterexampleLaw, StoppedSymmetricLaw, DriftedLaw>;

/// Seeded generator of paths for one law. Draws with equal (law, seed,
/// index) are bit-identical; distinct indices use independent streams.
class Sampler {
 public:
  /// Throws std::invalid_argument for dt <= 0, horizon <= 0 and similar.
  Sampler(Law law, std::uint64_t seed);

  /// Parses a law spec such as `bm(dt=1e-3,T=10)`, `counterexample()`,
  /// `ocone(clock=randrate,T=10)`, `stopped(level=1,mode=ramp)`, `drift(0.5)`.
  static Sampler parse(std::string_view spec, std::uint64_t seed);

  const Law& law() const { return law_; }
  std::uint64_t seed() const { return seed_; }
  double horizon() const;
  std::string describe() const;

  Path sample(std::uint64_t index) const;

  /// A prefix of sample(index) on which `rule` is observed (the whole path
  /// if it never is). Extends by `block` time units, then by doubling
  /// amounts. Valid because rules only look at the path up to their own time.
  Path sample_until(std::uint64_t index, const StoppingRule& rule, double block = 1.0) const;

  Sampler with_seed(std::uint64_t seed) const { return Sampler(law_, seed); }

 private:
  Law law_;
  std::uint64_t seed_;
};

}  // namespace reflectlab
