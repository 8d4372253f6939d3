#pragma once

#include <cstdint>
#include <random>

namespace sensikit {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream id of replicate `replicate` within study `study`.
constexpr std::uint64_t derive_stream_id(std::uint64_t study, std::uint64_t replicate) {
  return mix64(mix64(study) ^ (replicate + 0x632be59bd9b4e019ULL));
}

class Generator;

/// Names a reproducible random sequence. Two streams with the same
/// (root_seed, stream_id) produce identical sequences.
struct RngStream {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  Generator generator() const;

  /// A stream keyed by (this stream, child).
  RngStream substream(std::uint64_t child) const {
    return {root_seed, derive_stream_id(stream_id, child)};
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

class Generator {
 public:
  explicit Generator(const RngStream& stream);

  /// Uniform in the open interval (0,1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline Generator RngStream::generator() const { return Generator(*this); }

inline Generator::Generator(const RngStream& stream) {
  const std::uint64_t a = mix64(stream.root_seed);
  const std::uint64_t b = mix64(a ^ mix64(stream.stream_id ^ 0xd1b54a32d192ed03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

}  // namespace sensikit
