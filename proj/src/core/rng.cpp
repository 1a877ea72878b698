#include "wassval/core/rng.hpp"

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Rng Rng::substream(std::uint64_t index) const {
  // Mix (seed, index) through splitmix64 twice so consecutive indices land in
  // unrelated states.
  std::uint64_t sm = seed_;
  std::uint64_t h = splitmix64(sm) ^ (index + 0x632be59bd9b4e019ULL);
  std::uint64_t sm2 = h;
  return Rng(splitmix64(sm2));
}

std::uint64_t Rng::next_u64() {
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

double Rng::next_open01() {
  // 53 random bits in [0, 2^53), shifted by 1/2 ulp into (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_open01();
}

double Rng::next_normal() {
  return num::normal_quantile(next_open01());
}

}  // namespace wassval
