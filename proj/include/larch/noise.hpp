#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace larch {

/**
 * Symmetric innovation law, scaled so that E|xi| = 1.
 *
 * The scale is computed in closed form, not fitted. mu4 is +inf when the
 * fourth moment does not exist (Student with nu <= 4).
 */
struct NoiseSpec {
  enum class Kind { GaussianL1, StudentL1 };

  static NoiseSpec gaussian();
  static NoiseSpec student(int nu);

  Kind kind = Kind::GaussianL1;
  int nu = 0;
  double scale = 1.0;      // multiplier applied to the raw N(0,1) or t_nu draw
  double sigma_xi2 = 0.0;  // E[xi^2]
  double mu4 = 0.0;        // E[xi^4]

  bool has_fourth_moment() const;
  friend bool operator==(const NoiseSpec& a, const NoiseSpec& b) {
    return a.kind == b.kind && a.nu == b.nu;
  }
};

struct NoiseMoments {
  double l1;
  double sigma_xi2;
  double mu4;
};

NoiseMoments noise_moments(const NoiseSpec& spec);

/// Mixes (seed, stream) into an independent 64-bit seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// One reproducible stream of innovations. Not shareable across threads.
class NoiseStream {
 public:
  NoiseStream(const NoiseSpec& spec, std::uint64_t seed);
  double operator()();
  void fill(Eigen::Ref<Eigen::VectorXd> out);

 private:
  NoiseSpec spec_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// n i.i.d. draws, deterministic given (spec, seed).
Eigen::VectorXd sample_noise(const NoiseSpec& spec, std::uint64_t seed, Eigen::Index n);

}  // namespace larch
