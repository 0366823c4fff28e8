#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qmp/distance.hpp"
#include "qmp/errors.hpp"
#include "qmp/mp_law.hpp"
#include "qmp/sampling.hpp"
#include "qmp/spectra.hpp"

namespace qmp {

struct OutputFormats {
  bool csv{true};
  bool json{true};
  bool svg{true};
};

struct ExperimentConfig {
  std::size_t p{100};
  std::size_t n{200};
  EntryDistribution dist = gaussian();
  std::size_t replications{1};
  std::uint64_t seed{0};
  std::optional<double> eta;
  std::vector<Complex> z_grid{{0.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}};
  std::string output_dir;  // empty: nothing is written
  OutputFormats formats;
  unsigned workers{0};          // 0: hardware concurrency
  bool record_runtime{false};  // wall-clock seconds in report.json

  void validate() const {
    std::vector<std::string> bad;
    if (p < 1) bad.emplace_back("p: must be >= 1");
    if (n < 1) bad.emplace_back("n: must be >= 1");
    if (replications < 1) bad.emplace_back("replications: must be >= 1");
    if (!(dist.sigma2 > 0.0) || !std::isfinite(dist.sigma2)) bad.emplace_back("sigma2: must be positive");
    if (dist.kind == DistributionKind::StudentT && !(dist.df > 2.0)) bad.emplace_back("df: must be > 2");
    if (eta && !(*eta > 0.0)) bad.emplace_back("eta: must be positive");
    for (std::size_t i = 0; i < z_grid.size(); ++i)
      if (!(z_grid[i].imag() > 0.0)) bad.emplace_back("z_grid[" + std::to_string(i) + "]: Im z must be > 0");
    if (!bad.empty()) throw ValidationError(std::move(bad));
  }

  // Limit law the spectrum is compared against. The preprocessing pipeline
  // rescales entries to unit variance.
  MPLaw limit_law() const {
    return MPLaw(static_cast<double>(p) / static_cast<double>(n), eta ? 1.0 : dist.sigma2);
  }
};

struct ReplicationResult {
  std::size_t replication{0};
  std::uint64_t seed{0};
  double ks{0.0};
  double levy{0.0};
  double atom_mass{0.0};
  std::size_t replaced_count{0};
  std::vector<double> stieltjes_errors;
  std::vector<double> eigenvalues;
};

struct Summary {
  double median{0.0};
  double max{0.0};
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ReplicationResult> per_replication;
  Summary ks;
  Summary levy;
  Summary atom_mass;
  std::vector<Summary> stieltjes_errors;  // one per z_grid point
  double runtime_seconds{0.0};
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline Summary summarize(const std::vector<double>& v) {
  return {median(v), v.empty() ? 0.0 : *std::max_element(v.begin(), v.end())};
}

inline constexpr double kAtomRelativeThreshold = 1e-8;

// Copy of the spectrum with every eigenvalue at or below rel_threshold *
// lambda_max moved onto the origin.
inline std::vector<double> snap_to_atom(std::vector<double> sorted_eigenvalues,
                                        double rel_threshold = kAtomRelativeThreshold) {
  const std::size_t zeros = count_near_zero(sorted_eigenvalues, rel_threshold);
  std::fill_n(sorted_eigenvalues.begin(), zeros, 0.0);
  return sorted_eigenvalues;
}

inline std::uint64_t replication_seed(std::uint64_t seed, std::size_t r) { return mix64(seed, 0x7265706cULL, r); }

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// processed exactly once; the first exception is rethrown after all joins.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline ReplicationResult run_replication(const ExperimentConfig& cfg, std::size_t r, const MPLaw& law,
                                         const std::optional<TruncatedMoments>& moments) {
  ReplicationResult out;
  out.replication = r;
  out.seed = replication_seed(cfg.seed, r);
  QuaternionMatrix x = sample_matrix(cfg.p, cfg.n, cfg.dist, out.seed);
  if (cfg.eta) {
    PipelineResult stages = preprocess_entries(x, cfg.dist, *cfg.eta, out.seed, moments);
    out.replaced_count = stages.rescaled.replaced_count;
    x = std::move(stages.rescaled.matrix);
  }
  const SpectralSample sample = spectral_sample(x, out.seed, cfg.dist.tag());
  const StepCdf esd(snap_to_atom(sample.eigenvalues));
  const MPCdf limit(law);
  out.ks = kolmogorov_distance(esd, limit);
  out.levy = levy_distance(esd, limit);
  out.atom_mass = static_cast<double>(count_near_zero(sample.eigenvalues, kAtomRelativeThreshold)) /
                  static_cast<double>(sample.eigenvalues.size());
  for (const Complex& z : cfg.z_grid)
    out.stieltjes_errors.push_back(std::abs(empirical_stieltjes(sample, z) - mp_stieltjes(law, z)));
  out.eigenvalues = sample.eigenvalues;
  return out;
}

inline void write_report_files(const ConvergenceReport& report);

// Monte Carlo check of the limit law for one configuration. Replications are
// independent and may run concurrently; results are ordered by index.
inline ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const MPLaw law = cfg.limit_law();

  std::optional<TruncatedMoments> moments;
  if (cfg.eta) moments = truncated_moments(cfg.dist, *cfg.eta * std::sqrt(static_cast<double>(cfg.n)), cfg.seed);

  ConvergenceReport report;
  report.config = cfg;
  report.per_replication.resize(cfg.replications);
  parallel_for(cfg.replications, cfg.workers,
               [&](std::size_t r) { report.per_replication[r] = run_replication(cfg, r, law, moments); });

  std::vector<double> ks, levy, atom;
  for (const auto& rep : report.per_replication) {
    ks.push_back(rep.ks);
    levy.push_back(rep.levy);
    atom.push_back(rep.atom_mass);
  }
  report.ks = summarize(ks);
  report.levy = summarize(levy);
  report.atom_mass = summarize(atom);
  for (std::size_t z = 0; z < cfg.z_grid.size(); ++z) {
    std::vector<double> errs;
    for (const auto& rep : report.per_replication) errs.push_back(rep.stieltjes_errors[z]);
    report.stieltjes_errors.push_back(summarize(errs));
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!cfg.output_dir.empty()) write_report_files(report);
  return report;
}

inline void write_sweep_summary(const std::string& output_dir, const std::vector<ConvergenceReport>& reports);

// One experiment per (p, n); all sizes must share the ratio p/n within 1%.
inline std::vector<ConvergenceReport> run_sweep(const ExperimentConfig& base,
                                                const std::vector<std::pair<std::size_t, std::size_t>>& sizes) {
  std::vector<std::string> bad;
  if (sizes.empty()) bad.emplace_back("sizes: must be nonempty");
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i].first < 1 || sizes[i].second < 1) bad.emplace_back("sizes[" + std::to_string(i) + "]: p, n >= 1");
  if (bad.empty()) {
    const double y0 = static_cast<double>(sizes[0].first) / static_cast<double>(sizes[0].second);
    for (std::size_t i = 1; i < sizes.size(); ++i) {
      const double yi = static_cast<double>(sizes[i].first) / static_cast<double>(sizes[i].second);
      if (std::abs(yi / y0 - 1.0) > 0.01)
        bad.emplace_back("sizes[" + std::to_string(i) + "]: ratio p/n differs from sizes[0] by more than 1%");
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  std::vector<ConvergenceReport> reports;
  for (const auto& [p, n] : sizes) {
    ExperimentConfig cfg = base;
    cfg.p = p;
    cfg.n = n;
    if (!base.output_dir.empty())
      cfg.output_dir = base.output_dir + "/p" + std::to_string(p) + "_n" + std::to_string(n);
    reports.push_back(run_experiment(cfg));
  }
  if (!base.output_dir.empty()) write_sweep_summary(base.output_dir, reports);
  return reports;
}

}  // namespace qmp

#include "qmp/report_io.hpp"
