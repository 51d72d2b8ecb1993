#include "randqb/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "randqb/errors.hpp"

namespace rqb {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
__extension__ using u128 = unsigned __int128;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t origin_seed) : origin_(origin_seed) {
  std::uint64_t x = origin_seed;
  for (auto& w : s_) {
    w = splitmix64(x);
    x += kGolden;
  }
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  ++draws_;
  return result;
}

double RngStream::next_uniform() noexcept {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal() noexcept {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) noexcept {
  // Lemire's multiply-high with rejection of the biased low region.
  u128 prod = static_cast<u128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      prod = static_cast<u128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

Matrix gaussian_matrix(RngStream& stream, std::size_t rows, std::size_t cols) {
  Matrix g(rows, cols);
  for (double& x : g.data()) x = stream.next_normal();
  return g;
}

Matrix sparse_uniform_vector(RngStream& stream, std::size_t length, double density) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw ValidationError("sparse_uniform_vector: density must lie in (0, 1]");
  }
  const auto nnz = static_cast<std::size_t>(std::llround(density * static_cast<double>(length)));
  std::vector<std::size_t> idx(length);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Matrix v(length, 1);
  // Partial Fisher-Yates: position i is fixed, then its value is drawn.
  for (std::size_t i = 0; i < nnz; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(stream.next_below(length - i));
    std::swap(idx[i], idx[j]);
    v(idx[i], 0) = stream.next_uniform();
  }
  return v;
}

RngStream split_stream(const RngStream& stream, std::uint64_t index) {
  return RngStream(splitmix64(stream.origin_seed() ^ (index * kGolden)));
}

}  // namespace rqb
