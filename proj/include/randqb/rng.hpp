#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "randqb/matrix.hpp"

namespace rqb {

// One splitmix64 step from state x: advance by the golden gamma, then mix.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// xoshiro256++ seeded with four successive splitmix64 outputs of the origin seed.
// Normals come from Box-Muller with both outputs consumed in order; the spare is
// part of the stream state, so panel-wise draws match one large draw.
class RngStream {
 public:
  explicit RngStream(std::uint64_t origin_seed = 0);

  std::uint64_t origin_seed() const noexcept { return origin_; }
  // Raw 64-bit words taken from the generator so far.
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on (0, 1].
  double next_uniform() noexcept;
  double next_normal() noexcept;
  // Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t origin_ = 0;
  std::uint64_t draws_ = 0;
  std::optional<double> spare_;
};

// rows x cols of iid N(0,1), filled column-major.
Matrix gaussian_matrix(RngStream& stream, std::size_t rows, std::size_t cols);

// length x 1 vector with exactly round(density * length) nonzeros at uniformly
// chosen distinct positions, values iid on (0, 1].
Matrix sparse_uniform_vector(RngStream& stream, std::size_t length, double density);

// Independent child stream; depends only on the parent's origin seed and index.
RngStream split_stream(const RngStream& stream, std::uint64_t index);

}  // namespace rqb
