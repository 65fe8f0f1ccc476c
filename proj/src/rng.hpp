#pragma once

#include <cmath>
#include <cstdint>

namespace eeopt {

// Philox4x32-10 counter-based generator. A (seed, stream) pair addresses an
// independent substream, so per-trial streams make Monte Carlo results
// independent of scheduling and exactly replayable: trial i always sees the
// same draws no matter which worker runs it or in what order.
class Philox {
 public:
  using result_type = uint32_t;

  explicit Philox(uint64_t seed = 0, uint64_t stream = 0)
      : key0_(static_cast<uint32_t>(seed)), key1_(static_cast<uint32_t>(seed >> 32)) {
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<uint32_t>(stream);
    ctr_[3] = static_cast<uint32_t>(stream >> 32);
    refill();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()() {
    if (idx_ >= 4) {
      advance();
      refill();
    }
    return out_[idx_++];
  }

  // Uniform on (0, 1) with 53-bit resolution; never returns 0 or 1, so it is
  // safe under log().
  double uniform() {
    const uint64_t hi = (*this)();
    const uint64_t lo = (*this)();
    const uint64_t bits = (hi << 21) ^ lo;  // 53 significant bits
    return (static_cast<double>(bits & ((uint64_t(1) << 53) - 1)) + 0.5) * 0x1p-53;
  }

  // Uniform on (0, 1) from a single 32-bit word. Coarser grid than uniform(),
  // which is irrelevant for geometry coordinates but halves the RNG cost in
  // rejection loops.
  double uniform32() { return (static_cast<double>((*this)()) + 0.5) * 0x1p-32; }

  double exponential() { return -std::log(uniform()); }

  // Standard normal pair (Box-Muller).
  void normal_pair(double& a, double& b) {
    const double r = std::sqrt(2.0 * exponential());
    const double t = 6.283185307179586477 * uniform();
    a = r * std::cos(t);
    b = r * std::sin(t);
  }

  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return spare_normal_;
    }
    double a, b;
    normal_pair(a, b);
    spare_normal_ = b;
    have_normal_ = true;
    return a;
  }

  // Raw block function, exposed for the known-answer tests.
  static void block(const uint32_t ctr_in[4], uint32_t k0, uint32_t k1,
                    uint32_t out[4]) {
    uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = uint64_t(0xD2511F53u) * c0;
      const uint64_t p1 = uint64_t(0xCD9E8D57u) * c2;
      const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
      const uint32_t lo0 = static_cast<uint32_t>(p0);
      const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
      const uint32_t lo1 = static_cast<uint32_t>(p1);
      const uint32_t n0 = hi1 ^ c1 ^ k0;
      const uint32_t n1 = lo1;
      const uint32_t n2 = hi0 ^ c3 ^ k1;
      const uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
  }

 private:
  void refill() {
    block(ctr_, key0_, key1_, out_);
    idx_ = 0;
  }

  void advance() {
    if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; stream sits above
  }

  uint32_t ctr_[4] = {0, 0, 0, 0};
  uint32_t key0_ = 0, key1_ = 0;
  uint32_t out_[4] = {0, 0, 0, 0};
  int idx_ = 0;
  double spare_normal_ = 0.0;
  bool have_normal_ = false;
};

}  // namespace eeopt
