#pragma once

#include <array>
#include <cstdint>

namespace bermudan {

// Philox4x64-10 counter-based block cipher (Salmon et al., SC'11).
// Maps a 256-bit counter and a 128-bit key to 256 pseudo-random bits.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter encrypt(Counter ctr, Key key);
};

// A reproducible stream of standard-normal (and uniform) draws.
//
// The stream identity is (seed, stream_id); `lane` selects an independent
// substream (one per simulated path), and `counter` is the position within
// the lane. Draws are a pure function of (seed, stream_id, lane, counter), so
// any block of lanes can be generated by any worker in any order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t lane = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t lane() const { return lane_; }
  std::uint64_t counter() const { return counter_; }

  // Fresh stream positioned at the start of another lane.
  RngStream with_lane(std::uint64_t lane) const { return RngStream(seed_, stream_id_, lane); }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t lane_;
  std::uint64_t counter_ = 0;  // number of 256-bit blocks consumed

  std::array<std::uint64_t, 4> bits_{};
  int bits_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

RngStream make_stream(std::uint64_t seed, std::uint64_t stream_id);

}  // namespace bermudan
