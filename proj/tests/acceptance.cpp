// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "qmp/qmp.hpp"
#include "test_support.hpp"

namespace {

using namespace qmp;
namespace fs = std::filesystem;

struct Outcome {
  bool pass{false};
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<Complex> upper_half_plane_grid() {
  std::vector<Complex> grid;
  for (int iu = 0; iu < 10; ++iu)
    for (int iv = 0; iv < 10; ++iv) grid.emplace_back(-2.0 + iu * 1.1, std::pow(10.0, -2.0 + iv * 0.35));
  return grid;
}

Complex quadrature_stieltjes(const MPLaw& law, Complex z) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto re = [&](double x) { return mp_density(law, x) * std::real(1.0 / (x - z)); };
  auto im = [&](double x) { return mp_density(law, x) * std::imag(1.0 / (x - z)); };
  Complex v(q.integrate(re, law.lower(), law.upper(), 1e-14), q.integrate(im, law.lower(), law.upper(), 1e-14));
  if (law.has_atom()) v += law.atom() / -z;
  return v;
}

Outcome mp_analytics() {
  boost::math::quadrature::tanh_sinh<double> q;
  double worst_mass = 0.0, worst_total = 0.0, worst_atom = 0.0;
  for (double y : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const MPLaw law(y, 1.0);
    const double mass = q.integrate([&](double x) { return mp_density(law, x); }, law.lower(), law.upper(), 1e-14);
    worst_mass = std::max(worst_mass, std::abs(mass - std::min(1.0, 1.0 / y)));
    worst_total = std::max(worst_total, std::abs(mp_cdf(law, law.upper()) - 1.0));
    if (y > 1.0) {
      worst_atom = std::max(worst_atom, std::abs(law.atom() - (1.0 - 1.0 / y)));
      worst_atom = std::max(worst_atom, std::abs(mp_cdf(law, 0.0) - (1.0 - 1.0 / y)));
    }
  }
  return {worst_mass <= 1e-8 && worst_total <= 1e-8 && worst_atom <= 1e-12,
          fmt("mass err %.2e, G(b) err %.2e, atom err %.2e", worst_mass, worst_total, worst_atom)};
}

Outcome stieltjes_branch() {
  double worst_residual = 0.0, min_imag = std::numeric_limits<double>::infinity();
  for (double y : {0.5, 1.0, 2.0}) {
    const MPLaw law(y, 1.0);
    for (const Complex z : upper_half_plane_grid()) {
      const Complex m = mp_stieltjes(law, z);
      worst_residual = std::max(worst_residual, std::abs(y * z * m * m + (z - (1.0 - y)) * m + 1.0));
      min_imag = std::min(min_imag, m.imag());
    }
  }
  double worst_oracle = 0.0;
  const std::vector<std::pair<double, Complex>> spots{{0.5, {0, 1}},   {0.5, {1, 1}},    {0.5, {2, 0.5}}, {0.5, {-1, 0.3}},
                                                      {1.0, {1, 0.2}}, {1.0, {4.5, 1}},  {2.0, {0, 1}},   {2.0, {2, 0.5}},
                                                      {2.0, {0.1, 0.1}}, {2.0, {7, 3}}};
  for (const auto& [y, z] : spots) {
    const MPLaw law(y, 1.0);
    worst_oracle = std::max(worst_oracle, std::abs(mp_stieltjes(law, z) - quadrature_stieltjes(law, z)));
  }
  return {worst_residual <= 1e-12 && min_imag > 0.0 && worst_oracle <= 1e-8,
          fmt("residual %.2e, min Im m %.2e, quadrature err %.2e", worst_residual, min_imag, worst_oracle)};
}

Outcome inverse_structure() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int checked = 0;
  for (std::size_t blocks : {2u, 4u, 8u})
    for (int t = 0; t < 200; ++t) {
      const ComplexMatrix a = testing::random_type3(blocks, rng);
      worst = std::max(worst, inverse_structure_check(a).residual);
      ++checked;
    }
  return {worst <= 1e-10, fmt("%d matrices, worst Type-I residual of inverse %.2e", checked, worst)};
}

Outcome kramers_pairing() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SpectralSample s = spectral_sample(sample_matrix(50, 75, gaussian(), seed), seed);
    worst = std::max(worst, kramers_pair_gap(s.eigenvalues) / s.lambda_max());
  }
  return {worst <= 1e-8, fmt("worst pair gap / lambda_max %.2e", worst)};
}

Outcome rank_nullity_atom() {
  const SpectralSample a = spectral_sample(sample_matrix(100, 50, gaussian(), 5), 5);
  const SpectralSample b = spectral_sample(sample_matrix(100, 50, gaussian(), 5), 5);
  const std::size_t zeros = count_near_zero(a.eigenvalues, 1e-8);
  const double atom = esd_eval(snap_to_atom(a.eigenvalues), 0.0);
  const bool same = a.eigenvalues == b.eigenvalues;
  return {zeros == 100 && atom == 0.5 && same,
          fmt("%zu eigenvalues below 1e-8 lambda_max, ESD atom %.17g, rerun identical %s", zeros, atom,
              same ? "yes" : "no")};
}

ExperimentConfig sweep_base(const EntryDistribution& dist, std::optional<double> eta) {
  ExperimentConfig cfg;
  cfg.dist = dist;
  cfg.eta = eta;
  cfg.replications = 10;
  cfg.seed = 20240601;
  return cfg;
}

const std::vector<std::pair<std::size_t, std::size_t>> kSweepSizes{{50, 100}, {100, 200}, {200, 400}};

struct SweepOutcome {
  std::vector<double> medians;
  bool decreasing{true};
  std::string text() const {
    std::string s;
    for (double m : medians) s += fmt("%s%.4f", s.empty() ? "" : " > ", m);
    return s;
  }
};

SweepOutcome sweep_medians(const EntryDistribution& dist, std::optional<double> eta) {
  SweepOutcome out;
  for (const auto& r : run_sweep(sweep_base(dist, eta), kSweepSizes)) out.medians.push_back(r.ks.median);
  for (std::size_t i = 1; i < out.medians.size(); ++i) out.decreasing &= out.medians[i] < out.medians[i - 1];
  return out;
}

std::optional<SweepOutcome> gaussian_sweep;

Outcome main_convergence() {
  gaussian_sweep = sweep_medians(gaussian(), std::nullopt);
  const double last = gaussian_sweep->medians.back();
  return {gaussian_sweep->decreasing && last <= 0.08,
          fmt("median KS %s (strictly decreasing: %s)", gaussian_sweep->text().c_str(),
              gaussian_sweep->decreasing ? "yes" : "no")};
}

Outcome universality() {
  if (!gaussian_sweep) gaussian_sweep = sweep_medians(gaussian(), std::nullopt);
  const double reference = gaussian_sweep->medians.back();
  const SweepOutcome units = sweep_medians(signed_units(), std::nullopt);
  const SweepOutcome heavy = sweep_medians(student_t(3.0), 0.5);
  const double d_units = std::abs(units.medians.back() - reference);
  const double d_heavy = std::abs(heavy.medians.back() - reference);
  return {units.decreasing && heavy.decreasing && d_units <= 0.05 && d_heavy <= 0.05,
          fmt("signed_units %s (|diff| %.4f); student_t(3) eta=0.5 %s (|diff| %.4f)", units.text().c_str(), d_units,
              heavy.text().c_str(), d_heavy)};
}

Outcome resolvent_convergence() {
  ExperimentConfig cfg;
  cfg.p = 400;
  cfg.n = 800;
  cfg.replications = 5;
  cfg.seed = 77;
  const ConvergenceReport r = run_experiment(cfg);
  double worst = 0.0;
  std::string parts;
  for (std::size_t i = 0; i < r.stieltjes_errors.size(); ++i) {
    worst = std::max(worst, r.stieltjes_errors[i].median);
    parts += fmt("%s%.4f", parts.empty() ? "" : ", ", r.stieltjes_errors[i].median);
  }
  return {worst <= 0.05, "median |m_n - m| at i, 1+i, 2+0.5i: " + parts};
}

std::vector<double> gram_eigenvalues(const ComplexMatrix& a) {
  const ComplexMatrix s = a * a.adjoint();
  return hermitian_eigenvalues((s + s.adjoint()) / 2.0);
}

Outcome perturbation_inequalities() {
  const std::size_t p = 32, n = 48;
  double worst_rank_ratio = 0.0;
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto x = sample_matrix(p, n, gaussian(), seed);
      auto y = x;
      const auto other = sample_matrix(p, k, student_t(4.0), seed + 7);
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < p; ++j) y(j, (seed + 5 * c) % n) = other(j, c);
      const double ks = kolmogorov_distance(StepCdf(spectral_sample(x)), StepCdf(spectral_sample(y)));
      worst_rank_ratio = std::max(worst_rank_ratio, ks / (2.0 * k / (2.0 * p)));
    }

  const std::size_t q = 8, m = 12;
  const double rows = 2.0 * q;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> scale(0.01, 1.0);
  double worst_levy_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ComplexMatrix a = embed_matrix(sample_matrix(q, m, gaussian(), seed)) / std::sqrt(double(m));
    const ComplexMatrix d = embed_matrix(sample_matrix(q, m, student_t(5.0), seed + 1)) / std::sqrt(double(m));
    const ComplexMatrix b = a + scale(rng) * d;
    const double levy = levy_distance(StepCdf(gram_eigenvalues(a)), StepCdf(gram_eigenvalues(b)));
    const double bound = 2.0 / (rows * rows) * (a.squaredNorm() + b.squaredNorm()) * (a - b).squaredNorm();
    worst_levy_ratio = std::max(worst_levy_ratio, std::pow(levy, 4) / bound);
  }
  return {worst_rank_ratio <= 1.0 + 1e-12 && worst_levy_ratio <= 1.0 + 1e-9,
          fmt("worst KS / rank bound %.3f, worst L^4 / trace bound %.3f", worst_rank_ratio, worst_levy_ratio)};
}

Outcome mean_shift() {
  const std::size_t p = 200, n = 200;
  const auto plain = sample_matrix(p, n, gaussian(), 41);
  const auto moved = sample_matrix(p, n, shifted(gaussian(), {5, 0, 0, 0}), 41);
  const double ks = kolmogorov_distance(StepCdf(snap_to_atom(spectral_sample(plain).eigenvalues)),
                                        StepCdf(snap_to_atom(spectral_sample(moved).eigenvalues)));
  const double bound = 1.0 / p + 0.03;
  return {ks <= bound, fmt("KS between shifted and unshifted spectra %.4f (bound %.4f)", ks, bound)};
}

Outcome lindeberg() {
  // |x| = 1 for signed units, so eta sqrt(n) = 0.5 * 10 > 1 leaves nothing above the threshold.
  const double bounded = lindeberg_estimate(signed_units(), 0.5, 100, 1'000'000, 3);
  std::vector<double> heavy;
  for (std::size_t n : {100u, 1000u, 10000u}) heavy.push_back(lindeberg_estimate(student_t(3.0), 0.5, n, 1'000'000, 3));
  const bool decreasing = heavy[1] < heavy[0] && heavy[2] < heavy[1];
  return {bounded == 0.0 && decreasing,
          fmt("signed_units %.3g; student_t(3) at n=1e2,1e3,1e4: %.4g > %.4g > %.4g", bounded, heavy[0], heavy[1],
              heavy[2])};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "qmp_acceptance_determinism";
  fs::remove_all(root);
  ExperimentConfig cfg = sweep_base(gaussian(), std::nullopt);
  cfg.p = kSweepSizes[0].first;
  cfg.n = kSweepSizes[0].second;
  cfg.output_dir = (root / "a").string();
  run_experiment(cfg);
  cfg.output_dir = (root / "b").string();
  cfg.workers = 1;
  run_experiment(cfg);
  const bool csv = slurp(root / "a" / "eigenvalues.csv") == slurp(root / "b" / "eigenvalues.csv");
  const bool json = slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json");
  const bool nonempty = !slurp(root / "a" / "eigenvalues.csv").empty();
  return {csv && json && nonempty, fmt("eigenvalues.csv identical: %s, report.json identical: %s", csv ? "yes" : "no",
                                       json ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "limit law analytics", 1.0, mp_analytics},
      {2, "Stieltjes branch", 1.0, stieltjes_branch},
      {3, "Type-III inverse is Type-I", 5.0, inverse_structure},
      {4, "Kramers pairing", 30.0, kramers_pairing},
      {5, "atom by rank-nullity", 10.0, rank_nullity_atom},
      {6, "convergence to the limit law", 180.0, main_convergence},
      {7, "universality", 300.0, universality},
      {8, "resolvent convergence", 120.0, resolvent_convergence},
      {9, "perturbation inequalities", 30.0, perturbation_inequalities},
      {10, "mean-shift invariance", 30.0, mean_shift},
      {11, "Lindeberg estimator", 30.0, lindeberg},
      {12, "determinism", 180.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%2d] %-30s %7.2fs (budget %.0fs%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                c.budget_seconds, in_time ? "" : ", exceeded", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
