#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace dgames {

// SplitMix64 (Steele, Lea & Flood 2014). The whole state is one word and the
// update is pinned here, so a seed produces the same stream on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Derives an independent stream without disturbing this one's sequence.
  SplitMix64 split() { return SplitMix64(next() ^ 0x6a09e667f3bcc909ULL); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stateless mix of a seed and a counter, for generators that must be pure
// functions of (seed, round).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (counter + 1)));
  return g.next();
}

// Inverse-CDF draw over a weight vector. Cumulative sums are accumulated in
// ascending index order so the mapping from u to index is reproducible.
// Zero-weight entries can never be selected.
inline int sample_index(SplitMix64& rng, std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("sample_index: empty distribution");
  const double u = rng.next_double();
  double cum = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] <= 0.0) continue;
    last_positive = i;
    cum += p[i];
    if (u < cum) return i;
  }
  if (last_positive < 0) throw std::invalid_argument("sample_index: all weights zero");
  return last_positive;  // u landed in the rounding gap past the last mass
}

}  // namespace dgames
