#include "tcsde/rng.hpp"

#include <cmath>

#include "tcsde/errors.hpp"

namespace tcsde {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t splitmix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

StableParams::StableParams(double beta_) : beta(beta_) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw ParameterError("stable exponent must lie in (0,1), got " +
                         std::to_string(beta_));
  }
  inv_beta = 1.0 / beta;
  one_minus_beta_over_beta = (1.0 - beta) / beta;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // stream_id enters through a bijective mix, so distinct ids give distinct
  // splitmix chains even for equal seeds
  std::uint64_t x = seed ^ (kGolden * (stream_id + 1));
  for (auto& word : state_) word = splitmix64(x);
  // xoshiro forbids the all-zero state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform_open() {
  // 53-bit mantissa, shifted off the endpoints: values lie in
  // [2^-54, 1 - 2^-54], so log() and log(1-u) are always finite
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform_open()); }

double RngStream::standard_normal() {
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double RngStream::gaussian(double variance) {
  if (variance < 0.0) {
    throw ParameterError("gaussian variance must be nonnegative");
  }
  if (variance == 0.0) return 0.0;
  return std::sqrt(variance) * standard_normal();
}

double RngStream::stable_increment(const StableParams& params, double dt) {
  if (!(dt > 0.0)) throw ParameterError("stable increment needs dt > 0");
  const double b = params.beta;
  const double theta = kPi * uniform_open();
  const double w = exponential();
  // Kanter's representation of the positive stable law: with theta uniform
  // on (0,pi) and w ~ Exp(1),
  //   log S = log sin(b*theta) + ((1-b)/b) log sin((1-b)*theta)
  //           - (1/b) log sin(theta) - ((1-b)/b) log w
  // gives E[exp(-s S)] = exp(-s^b).
  const double log_a = std::log(std::sin(b * theta)) +
                       params.one_minus_beta_over_beta *
                           std::log(std::sin((1.0 - b) * theta)) -
                       params.inv_beta * std::log(std::sin(theta));
  const double log_s =
      log_a - params.one_minus_beta_over_beta * std::log(w);
  const double increment = std::exp(params.inv_beta * std::log(dt) + log_s);
  if (!std::isfinite(increment) || increment <= 0.0) {
    throw RangeError("stable increment left the representable range");
  }
  return increment;
}

double sample_stable_increment(const StableParams& params, double dt,
                               RngStream& rng) {
  return rng.stable_increment(params, dt);
}

double sample_gaussian_increment(double variance, RngStream& rng) {
  return rng.gaussian(variance);
}

}  // namespace tcsde
