// Copyright 2026 The pointdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POINTDET_RNG_HPP_
#define POINTDET_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pointdet
{

// Counter-free deterministic generator (xoshiro256** seeded via splitmix64).
// Every distribution below is implemented in-house so that seeded runs are
// byte-identical across compilers and standard libraries; std::uniform_*
// distributions give no such guarantee.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
  {
    std::uint64_t x = seed;
    for (auto & word : state_) {
      word = splitmix64(x);
    }
  }

  std::uint64_t next()
  {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n); n must be > 0. Lemire's unbiased method.
  std::uint64_t uniform_below(std::uint64_t n)
  {
    while (true) {
      const std::uint64_t x = next();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
      const auto low = static_cast<std::uint64_t>(m);
      if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        if (low < threshold) {
          continue;
        }
      }
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

  // Gaussian via Box-Muller; two uniforms per sample, no cached spare.
  double normal(double mean, double stddev)
  {
    double u1 = uniform01();
    while (u1 <= 0.0) {
      u1 = uniform01();
    }
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * radius * std::cos(two_pi * u2);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T> & values)
  {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // k distinct values from [0, n), uniform, in draw order; k <= n.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k)
  {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
      pool[i] = i;
    }
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  static std::uint64_t splitmix64(std::uint64_t & x)
  {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t state_[4];
};

inline std::uint64_t hash_string(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent per-frame / per-purpose stream derived from one master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream_tag)
{
  std::uint64_t x = seed ^ hash_string(stream_tag);
  Rng::splitmix64(x);
  return Rng::splitmix64(x);
}

}  // namespace pointdet

#endif  // POINTDET_RNG_HPP_
