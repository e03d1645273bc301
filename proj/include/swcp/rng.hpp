#ifndef SWCP_RNG_HPP_
#define SWCP_RNG_HPP_

#include <cstdint>
#include <limits>
#include <string_view>

namespace swcp {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// FNV-1a, used to turn experiment ids into stream keys.
constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of replicate `index` of experiment `experiment`. Pure function of its
/// arguments, so replicates can run in any order on any worker.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::string_view experiment,
                                       std::uint64_t index) {
  return hash_combine(hash_combine(master, hash_string(experiment)), index);
}

/// Counter-based stream: the k-th draw is splitmix64(key + k * golden).
/// Satisfies UniformRandomBitGenerator so it also drives std algorithms.
class counter_stream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit counter_stream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    return splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on [0,1) with 53 bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // p = 0 never fires, p = 1 always fires.
  constexpr bool bernoulli(double p) { return uniform() < p; }

  // Unbiased draw from [0, n) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    unsigned __int128 prod = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        prod = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  constexpr std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Trial stream of one source (vertex key, particle index) at step t of a
/// replicate. Two processes sharing (seed, t, vertex, particle) see the same
/// trial outcomes, which is what the coupling arguments rely on.
constexpr counter_stream trial_stream(std::uint64_t replicate, std::uint64_t t,
                                      std::uint64_t vertex_key, std::uint64_t particle = 0) {
  return counter_stream(
      hash_combine(hash_combine(hash_combine(replicate, t), vertex_key), particle));
}

}  // namespace swcp

#endif  // SWCP_RNG_HPP_
