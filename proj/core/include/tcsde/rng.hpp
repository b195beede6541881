#pragma once

#include <array>
#include <cstdint>

namespace tcsde {

// Index of a one-sided stable law by its exponent. The Laplace transform of
// the increment over dt is exp(-dt * s^beta).
struct StableParams {
  explicit StableParams(double beta_);

  double beta;
  // cached exponents used by the sampler
  double inv_beta;
  double one_minus_beta_over_beta;
};

// Counter-seeded xoshiro256++ stream. Streams with distinct (seed, stream_id)
// pairs are statistically independent; the same pair always reproduces the
// same draw sequence, which is what the replay machinery relies on.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // uniform on the open interval (0,1); never returns an endpoint
  double uniform_open();

  // standard Exp(1) variate, strictly positive
  double exponential();

  double standard_normal();

  // N(0, variance). variance == 0 short-circuits to exactly 0.0 without
  // consuming randomness, so flat-clock steps stay bitwise quiet.
  double gaussian(double variance);

  // Increment of the stable subordinator over a step dt > 0, i.e.
  // dt^(1/beta) times a standard positive stable variate.
  double stable_increment(const StableParams& params, double dt);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

double sample_stable_increment(const StableParams& params, double dt,
                               RngStream& rng);
double sample_gaussian_increment(double variance, RngStream& rng);

}  // namespace tcsde
