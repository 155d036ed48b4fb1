// Seeded randomness with a platform-independent output sequence.
// std::mt19937_64 is fully specified by the standard; the distributions
// below are implemented here because the std:: ones are not.
#ifndef TURNKIT_RNG_H_
#define TURNKIT_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace turnkit {

std::uint64_t SplitMix64(std::uint64_t x);
// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t HashString(std::string_view s);
std::uint64_t MixSeeds(std::uint64_t a, std::uint64_t b);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
  std::size_t Index(std::size_t n);
  double Normal();
  double Exponential(double mean);

  template <class T>
  void Shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace turnkit

#endif  // TURNKIT_RNG_H_
