#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "qmp/embed.hpp"
#include "qmp/errors.hpp"
#include "qmp/quaternion.hpp"

namespace qmp {

// SplitMix64 finalizer. Derives independent streams from (seed, coordinates).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t a) { return mix64(mix64(seed) ^ a); }

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed, a) ^ mix64(b + 0x632be59bd9b4e019ULL));
}

// Counter-based 64-bit generator satisfying UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

enum class DistributionKind { Gaussian, SignedUnits, StudentT };

// Law of one quaternion entry. `sigma2` is the variance E||x - Ex||^2 and `mu`
// the mean; a non-zero mu makes this the shifted version of the base law.
struct EntryDistribution {
  DistributionKind kind{DistributionKind::Gaussian};
  double sigma2{1.0};
  double df{0.0};  // StudentT only
  Quaternion mu{};

  bool shifted() const noexcept { return mu != Quaternion{}; }

  void validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("EntryDistribution: sigma2 must be positive");
    if (kind == DistributionKind::StudentT && !(df > 2.0))
      throw DomainError("EntryDistribution: student_t requires df > 2");
  }

  std::string tag() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case DistributionKind::Gaussian: os << "gaussian"; break;
      case DistributionKind::SignedUnits: os << "signed_units"; break;
      case DistributionKind::StudentT: os << "student_t(" << df << ")"; break;
    }
    os << "[sigma2=" << sigma2 << "]";
    if (!shifted()) return os.str();
    std::ostringstream wrapped;
    wrapped.precision(17);
    wrapped << "shifted(" << os.str() << "," << mu << ")";
    return wrapped.str();
  }
};

inline EntryDistribution gaussian(double sigma2 = 1.0) { return {DistributionKind::Gaussian, sigma2, 0.0, {}}; }
inline EntryDistribution signed_units(double sigma2 = 1.0) { return {DistributionKind::SignedUnits, sigma2, 0.0, {}}; }
inline EntryDistribution student_t(double df, double sigma2 = 1.0) {
  return {DistributionKind::StudentT, sigma2, df, {}};
}
inline EntryDistribution shifted(EntryDistribution base, const Quaternion& mu) {
  base.mu += mu;
  return base;
}

template <typename Engine>
Quaternion draw_entry(const EntryDistribution& dist, Engine& engine) {
  Quaternion q;
  switch (dist.kind) {
    case DistributionKind::Gaussian: {
      std::normal_distribution<double> normal(0.0, std::sqrt(dist.sigma2 / 4.0));
      q = {normal(engine), normal(engine), normal(engine), normal(engine)};
      break;
    }
    case DistributionKind::SignedUnits: {
      std::uniform_int_distribution<int> pick(0, 7);
      const int u = pick(engine);
      const double v = (u % 2 == 0 ? 1.0 : -1.0) * std::sqrt(dist.sigma2);
      switch (u / 2) {
        case 0: q.a = v; break;
        case 1: q.b = v; break;
        case 2: q.c = v; break;
        default: q.d = v; break;
      }
      break;
    }
    case DistributionKind::StudentT: {
      std::student_t_distribution<double> t(dist.df);
      const double magnitude = t(engine) * std::sqrt(dist.sigma2 * (dist.df - 2.0) / dist.df);
      std::normal_distribution<double> normal;
      Quaternion dir;
      double r = 0.0;
      do {
        dir = {normal(engine), normal(engine), normal(engine), normal(engine)};
        r = norm(dir);
      } while (r == 0.0);
      q = dir * (magnitude / r);
      break;
    }
  }
  return q + dist.mu;
}

inline SplitMix64 entry_engine(std::uint64_t seed, std::size_t j, std::size_t k) {
  return SplitMix64(mix64(seed, j, k));
}

// p x n matrix of independent draws; entry (j, k) depends only on (seed, j, k).
inline QuaternionMatrix sample_matrix(std::size_t p, std::size_t n, const EntryDistribution& dist, std::uint64_t seed) {
  if (p < 1 || n < 1) throw DomainError("sample_matrix: p and n must be >= 1");
  dist.validate();
  QuaternionMatrix x(p, n);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      auto engine = entry_engine(seed, j, k);
      x(j, k) = draw_entry(dist, engine);
    }
  return x;
}

// E[x I(||x|| <= threshold)] and E[||x||^2 I(||x|| <= threshold)].
struct TruncatedMoments {
  Quaternion mean{};
  double second_moment{0.0};

  double centered_variance() const { return std::max(0.0, second_moment - norm_squared(mean)); }
};

inline constexpr std::size_t kMomentCacheDraws = 1'000'000;

// Monte Carlo estimate over `draws` samples of a single seeded stream.
inline TruncatedMoments monte_carlo_truncated_moments(const EntryDistribution& dist, double threshold,
                                                      std::uint64_t seed, std::size_t draws = kMomentCacheDraws) {
  dist.validate();
  if (draws < 1) throw DomainError("monte_carlo_truncated_moments: draws must be >= 1");
  SplitMix64 engine(mix64(seed, 0x7472756e63617465ULL));
  Quaternion sum{};
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < draws; ++t) {
    const Quaternion x = draw_entry(dist, engine);
    const double n2 = norm_squared(x);
    if (std::sqrt(n2) <= threshold) {
      sum += x;
      sum_sq += n2;
    }
  }
  const double inv = 1.0 / static_cast<double>(draws);
  return {sum * inv, sum_sq * inv};
}

// Closed form for the centred gaussian and signed_units laws, Monte Carlo otherwise.
inline TruncatedMoments truncated_moments(const EntryDistribution& dist, double threshold, std::uint64_t seed = 0,
                                          std::size_t draws = kMomentCacheDraws) {
  dist.validate();
  if (!dist.shifted()) {
    if (dist.kind == DistributionKind::SignedUnits) {
      const bool kept = std::sqrt(dist.sigma2) <= threshold;
      return {{}, kept ? dist.sigma2 : 0.0};
    }
    if (dist.kind == DistributionKind::Gaussian) {
      // ||x||^2 = s chi^2_4 with s = sigma2/4; E[chi^2_4 1(chi^2_4 <= u)] = 4 P(chi^2_6 <= u).
      const double s = dist.sigma2 / 4.0;
      const double u = threshold * threshold / s;
      const double chi6_cdf = -std::expm1(-u / 2.0) - std::exp(-u / 2.0) * (u / 2.0 + u * u / 8.0);
      return {{}, 4.0 * s * chi6_cdf};
    }
  }
  return monte_carlo_truncated_moments(dist, threshold, seed, draws);
}

enum class PipelineStage { Truncated, Centralized, Rescaled };

struct PipelineOutput {
  PipelineStage stage{PipelineStage::Truncated};
  QuaternionMatrix matrix;
  std::size_t replaced_count{0};
  double threshold{0.0};
};

struct PipelineResult {
  PipelineOutput truncated;
  PipelineOutput centralized;
  PipelineOutput rescaled;
};

// Replacement variable for entries whose centred variance collapses:
// bounded, mean zero, variance one.
inline EntryDistribution substitute_distribution() { return signed_units(1.0); }

// Zero the entries with ||x|| > eta sqrt(n).
inline QuaternionMatrix truncate_entries(const QuaternionMatrix& x, double threshold) {
  QuaternionMatrix out = x;
  for (auto& q : out.entries())
    if (norm(q) > threshold) q = Quaternion{};
  return out;
}

// Truncation at eta*sqrt(n), centring by the truncated mean, and rescaling to
// unit variance. When the centred variance falls below half of the nominal
// sigma2, the entry is replaced by an independent substitute draw.
inline PipelineResult preprocess_entries(const QuaternionMatrix& x, const EntryDistribution& dist, double eta,
                                         std::uint64_t seed, std::optional<TruncatedMoments> moments = std::nullopt) {
  if (!(eta > 0.0)) throw DomainError("preprocess_entries: eta must be positive");
  const double threshold = eta * std::sqrt(static_cast<double>(x.cols()));
  const TruncatedMoments m = moments ? *moments : truncated_moments(dist, threshold, seed);

  PipelineResult out;
  out.truncated = {PipelineStage::Truncated, truncate_entries(x, threshold), 0, threshold};

  out.centralized = {PipelineStage::Centralized, out.truncated.matrix, 0, threshold};
  for (auto& q : out.centralized.matrix.entries()) q -= m.mean;

  out.rescaled = {PipelineStage::Rescaled, out.centralized.matrix, 0, threshold};
  const double variance = m.centered_variance();
  if (variance / dist.sigma2 < 0.5) {
    const EntryDistribution zeta = substitute_distribution();
    const std::uint64_t zeta_seed = mix64(seed, 0x7a657461ULL);
    for (std::size_t j = 0; j < x.rows(); ++j)
      for (std::size_t k = 0; k < x.cols(); ++k) {
        auto engine = entry_engine(zeta_seed, j, k);
        out.rescaled.matrix(j, k) = draw_entry(zeta, engine);
      }
    out.rescaled.replaced_count = x.size();
  } else {
    const double inv_sd = 1.0 / std::sqrt(variance);
    for (auto& q : out.rescaled.matrix.entries()) q *= inv_sd;
  }
  return out;
}

// Monte Carlo estimate of E ||x||^2 I(||x|| > eta sqrt(n)).
inline double lindeberg_estimate(const EntryDistribution& dist, double eta, std::size_t n, std::size_t draws,
                                 std::uint64_t seed) {
  if (draws < 1) throw DomainError("lindeberg_estimate: draws must be >= 1");
  dist.validate();
  const double threshold = eta * std::sqrt(static_cast<double>(n));
  SplitMix64 engine(mix64(seed, 0x6c696e6465626572ULL));
  double sum = 0.0;
  for (std::size_t t = 0; t < draws; ++t) {
    const Quaternion x = draw_entry(dist, engine);
    const double n2 = norm_squared(x);
    if (std::sqrt(n2) > threshold) sum += n2;
  }
  return sum / static_cast<double>(draws);
}

}  // namespace qmp
