#include "ssc/rng.hpp"

#include <cmath>
#include <numbers>

namespace ssc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream_id) {
  return mix64(mix64(parent + kGolden) ^ (stream_id * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

RngSpec RngSpec::child(std::uint64_t id) const {
  RngSpec out = *this;
  out.stream_id.push_back(id);
  return out;
}

std::uint64_t RngSpec::key() const {
  std::uint64_t k = mix64(master_seed);
  for (auto id : stream_id) k = derive_seed(k, id);
  return k;
}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Lemire-style rejection keeps the result unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index n, double stddev) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = stddev * normal();
  return v;
}

Eigen::VectorXd Rng::unit_vector(Eigen::Index n) {
  for (;;) {
    Eigen::VectorXd v = normal_vector(n);
    const double norm = v.norm();
    if (norm > 1e-300) return v / norm;
  }
}

}  // namespace ssc
