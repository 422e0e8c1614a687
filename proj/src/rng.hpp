#pragma once

// Deterministic random streams. mt19937_64 supplies the bit stream (its
// output sequence is fixed by the standard); the double transforms are
// hand-rolled so results do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace fgl {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  return splitmix64(mix_seed(a, b) ^ c);
}

class Rng {
 public:
  static constexpr const char* kVersion = "mt19937_64/bm-v1";

  explicit Rng(uint64_t seed) : gen_(seed) {}

  // open interval (0,1), 53 random bits
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fgl
