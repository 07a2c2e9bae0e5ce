#include "larch/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace larch {

NoiseSpec NoiseSpec::gaussian() {
  NoiseSpec s;
  s.kind = Kind::GaussianL1;
  // E|Z| = sqrt(2/pi) for Z ~ N(0,1).
  s.scale = std::sqrt(std::numbers::pi / 2.0);
  s.sigma_xi2 = std::numbers::pi / 2.0;
  s.mu4 = 3.0 * s.sigma_xi2 * s.sigma_xi2;
  return s;
}

NoiseSpec NoiseSpec::student(int nu) {
  if (nu <= 2)
    throw std::invalid_argument("Student noise needs nu > 2 for a finite variance, got " +
                                std::to_string(nu));
  NoiseSpec s;
  s.kind = Kind::StudentL1;
  s.nu = nu;
  const double v = nu;
  const double abs_mean = 2.0 * std::sqrt(v) * std::exp(std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0)) /
                          (std::sqrt(std::numbers::pi) * (v - 1.0));
  s.scale = 1.0 / abs_mean;
  const double s2 = s.scale * s.scale;
  s.sigma_xi2 = s2 * v / (v - 2.0);
  s.mu4 = nu > 4 ? s2 * s2 * 3.0 * v * v / ((v - 2.0) * (v - 4.0))
                 : std::numeric_limits<double>::infinity();
  return s;
}

bool NoiseSpec::has_fourth_moment() const { return std::isfinite(mu4); }

NoiseMoments noise_moments(const NoiseSpec& spec) { return {1.0, spec.sigma_xi2, spec.mu4}; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

NoiseStream::NoiseStream(const NoiseSpec& spec, std::uint64_t seed)
    : spec_(spec), engine_(derive_seed(seed, 0)) {}

double NoiseStream::operator()() {
  const double z = normal_(engine_);
  if (spec_.kind == NoiseSpec::Kind::GaussianL1) return spec_.scale * z;
  // t_nu = Z / sqrt(chi2_nu / nu), chi2 built from nu squared normals.
  double chi2 = 0.0;
  for (int i = 0; i < spec_.nu; ++i) {
    const double w = normal_(engine_);
    chi2 += w * w;
  }
  return spec_.scale * z / std::sqrt(chi2 / spec_.nu);
}

void NoiseStream::fill(Eigen::Ref<Eigen::VectorXd> out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = (*this)();
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec, std::uint64_t seed, Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("sample_noise needs n >= 1");
  Eigen::VectorXd out(n);
  NoiseStream stream(spec, seed);
  stream.fill(out);
  return out;
}

}  // namespace larch
