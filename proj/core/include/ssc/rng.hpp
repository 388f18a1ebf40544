#pragma once

// Portable counter-based random numbers.
//
// Every draw is a pure function of (key, counter): the k-th 64-bit output of a
// stream is mix64(key + (k + 1) * 0x9E3779B97F4A7C15), i.e. SplitMix64. Normals
// use Box-Muller. Streams are addressed by RngSpec: a master seed plus a path of
// stream ids (grid cell, column index, ...). The child key is derived by folding
// the path into the seed with derive_seed(), so draws never depend on the order
// in which parallel workers run.

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ssc {

std::uint64_t mix64(std::uint64_t z);

/// child = hash(parent, stream_id)
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream_id);

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> stream_id;

  RngSpec child(std::uint64_t id) const;
  std::uint64_t key() const;
};

class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}
  explicit Rng(const RngSpec& spec) : key_(spec.key()) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  Eigen::VectorXd normal_vector(Eigen::Index n, double stddev = 1.0);
  /// Uniform on the unit sphere S^{n-1} (normalized Gaussian draw).
  Eigen::VectorXd unit_vector(Eigen::Index n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ssc
