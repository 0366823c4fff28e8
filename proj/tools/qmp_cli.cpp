// Command-line front end: simulate, sweep, density, stieltjes, check-structure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmp/qmp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "re+imi" or "re-imi"
qmp::Complex parse_complex(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double re = std::strtod(begin, &end);
  if (end == begin) throw qmp::ValidationError({"z-grid: cannot parse '" + text + "'"});
  const char* rest = end;
  const double im = std::strtod(rest, &end);
  if (end == rest || *end != 'i' || *(end + 1) != '\0' || (*rest != '+' && *rest != '-'))
    throw qmp::ValidationError({"z-grid: expected re+imi, got '" + text + "'"});
  return {re, im};
}

std::vector<qmp::Complex> parse_z_grid(const std::string& text) {
  std::vector<qmp::Complex> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_complex(item));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& item : split(text, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw qmp::ValidationError({"sizes: expected PxN, got '" + item + "'"});
    try {
      out.emplace_back(std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1)));
    } catch (const std::exception&) {
      throw qmp::ValidationError({"sizes: expected PxN, got '" + item + "'"});
    }
  }
  return out;
}

struct ExperimentFlags {
  std::string config_file;
  std::size_t p{100};
  std::size_t n{200};
  std::string dist{"gaussian"};
  double df{5.0};
  double sigma2{1.0};
  std::string mu;
  double eta{0.0};
  std::size_t reps{1};
  std::uint64_t seed{0};
  std::string z_grid;
  std::string out;
  std::vector<std::string> formats;
  unsigned workers{0};
  bool timing{false};

  CLI::App* app{nullptr};

  void attach(CLI::App* sub, bool with_outputs) {
    app = sub;
    sub->add_option("--config", config_file, "JSON experiment configuration");
    sub->add_option("--p", p, "Quaternion rows");
    sub->add_option("--n", n, "Quaternion columns (sample size)");
    sub->add_option("--dist", dist, "Entry distribution")
        ->check(CLI::IsMember({"gaussian", "signed-units", "student-t"}));
    sub->add_option("--df", df, "Student-t degrees of freedom (> 2)");
    sub->add_option("--sigma2", sigma2, "Entry variance");
    sub->add_option("--mu", mu, "Common mean a,b,c,d");
    sub->add_option("--eta", eta, "Truncation parameter; enables the preprocessing pipeline");
    sub->add_option("--reps", reps, "Replications");
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--z-grid", z_grid, "Comma-separated points re+imi");
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)");
    if (with_outputs) {
      sub->add_option("--out", out, "Output directory");
      sub->add_option("--format", formats, "Outputs to write (csv, json, svg); default all")
          ->delimiter(',')
          ->check(CLI::IsMember({"csv", "json", "svg"}));
      sub->add_flag("--timing", timing, "Record wall-clock runtime in report.json");
    }
  }

  bool given(const char* name) const {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  }

  qmp::ExperimentConfig build() const {
    qmp::ExperimentConfig cfg;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw qmp::IoError(config_file, "cannot open configuration");
      qmp::Json j;
      try {
        in >> j;
      } catch (const qmp::Json::exception& e) {
        throw qmp::ValidationError({std::string("config: ") + e.what()});
      }
      cfg = qmp::config_from_json(j, cfg);
    }
    if (given("--p")) cfg.p = p;
    if (given("--n")) cfg.n = n;
    // Flags override the file; without a file every flag default applies.
    const bool fresh = config_file.empty();
    if (fresh || given("--dist")) cfg.dist.kind = qmp::parse_distribution_kind(dist);
    if (fresh || given("--sigma2")) cfg.dist.sigma2 = sigma2;
    if (fresh || given("--df")) cfg.dist.df = df;
    if (given("--mu")) {
      const auto parts = split(mu, ',');
      if (parts.size() != 4) throw qmp::ValidationError({"mu: expected a,b,c,d"});
      try {
        cfg.dist.mu = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
      } catch (const std::exception&) {
        throw qmp::ValidationError({"mu: expected four numbers"});
      }
    }
    if (given("--eta")) cfg.eta = eta;
    if (given("--reps")) cfg.replications = reps;
    if (given("--seed")) cfg.seed = seed;
    if (given("--z-grid")) cfg.z_grid = parse_z_grid(z_grid);
    if (given("--out")) cfg.output_dir = out;
    if (!formats.empty()) {
      cfg.formats = {false, false, false};
      for (const auto& f : formats) {
        if (f == "csv") cfg.formats.csv = true;
        if (f == "json") cfg.formats.json = true;
        if (f == "svg") cfg.formats.svg = true;
      }
    }
    cfg.workers = workers;
    cfg.record_runtime = timing;
    cfg.validate();
    return cfg;
  }
};

void print_report(const qmp::ConvergenceReport& r) {
  const qmp::MPLaw law = r.config.limit_law();
  std::printf("p=%zu n=%zu y=%.6g sigma2=%.6g dist=%s reps=%zu\n", r.config.p, r.config.n, law.y(), law.sigma2(),
              r.config.dist.tag().c_str(), r.config.replications);
  std::printf("  ks    median=%.6g max=%.6g\n", r.ks.median, r.ks.max);
  std::printf("  levy  median=%.6g max=%.6g\n", r.levy.median, r.levy.max);
  std::printf("  atom  median=%.6g (limit %.6g)\n", r.atom_mass.median, law.atom());
  for (std::size_t i = 0; i < r.stieltjes_errors.size(); ++i)
    std::printf("  |m_n - m| at z=%g%+gi  median=%.6g max=%.6g\n", r.config.z_grid[i].real(),
                r.config.z_grid[i].imag(), r.stieltjes_errors[i].median, r.stieltjes_errors[i].max);
  std::printf("  runtime %.3f s\n", r.runtime_seconds);
}

int cmd_density(double y, double sigma2, std::size_t points, double from, double to) {
  const qmp::MPLaw law(y, sigma2);
  if (to <= from) to = law.upper() * 1.05;
  std::printf("x,density,cdf\n");
  const std::size_t steps = std::max<std::size_t>(points, 2);
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
    std::printf("%s,%s,%s\n", qmp::format_g17(x).c_str(), qmp::format_g17(qmp::mp_density(law, x)).c_str(),
                qmp::format_g17(qmp::mp_cdf(law, x)).c_str());
  }
  return kExitOk;
}

int cmd_stieltjes(const qmp::ExperimentConfig& cfg) {
  const qmp::MPLaw law = cfg.limit_law();
  qmp::QuaternionMatrix x = qmp::sample_matrix(cfg.p, cfg.n, cfg.dist, qmp::replication_seed(cfg.seed, 0));
  if (cfg.eta) x = qmp::preprocess_entries(x, cfg.dist, *cfg.eta, qmp::replication_seed(cfg.seed, 0)).rescaled.matrix;
  const qmp::SpectralSample s = qmp::spectral_sample(x, cfg.seed, cfg.dist.tag());
  std::printf("re_z,im_z,re_m,im_m,re_mn,im_mn,abs_diff\n");
  for (const auto& z : cfg.z_grid) {
    const auto m = qmp::mp_stieltjes(law, z);
    const auto mn = qmp::empirical_stieltjes(s, z);
    std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", z.real(), z.imag(), m.real(), m.imag(), mn.real(),
                mn.imag(), std::abs(mn - m));
  }
  return kExitOk;
}

// Random invertible Type-III matrix of dimension 2 * blocks.
qmp::ComplexMatrix random_type3(std::size_t blocks, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  auto c = [&] { return qmp::Complex(normal(rng), normal(rng)); };
  const auto dim = static_cast<Eigen::Index>(2 * blocks);
  qmp::ComplexMatrix a = qmp::ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim / 2; ++j) {
    const qmp::Complex t = c();
    a(2 * j, 2 * j) = t;
    a(2 * j + 1, 2 * j + 1) = t;
    for (Eigen::Index l = j + 1; l < dim / 2; ++l) {
      const qmp::Complex x = c(), y = c();
      a(2 * j, 2 * l) = x;
      a(2 * j, 2 * l + 1) = y;
      a(2 * j + 1, 2 * l) = -std::conj(y);
      a(2 * j + 1, 2 * l + 1) = std::conj(x);
      a(2 * l, 2 * j) = std::conj(x);
      a(2 * l, 2 * j + 1) = -y;
      a(2 * l + 1, 2 * j) = std::conj(y);
      a(2 * l + 1, 2 * j + 1) = x;
    }
  }
  return a;
}

int cmd_check_structure(std::size_t count, std::uint64_t seed) {
  constexpr double kTolerance = 1e-10;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t skipped = 0;
  for (std::size_t dim : {4u, 8u, 16u}) {
    double worst_dim = 0.0;
    std::size_t done = 0;
    while (done < count) {
      const qmp::ComplexMatrix a = random_type3(dim / 2, rng);
      try {
        worst_dim = std::max(worst_dim, qmp::inverse_structure_check(a).residual);
        ++done;
      } catch (const qmp::InvertibilityError&) {
        ++skipped;
      }
    }
    std::printf("2n=%-3zu  %zu Type-III inverses  max Type-I residual %.3e\n", dim, count, worst_dim);
    worst = std::max(worst, worst_dim);
  }
  // Embedded sample covariance shifted by z is Type-III, and Type-I/II hold for it too.
  const auto x = qmp::sample_matrix(6, 9, qmp::gaussian(), seed);
  const qmp::ComplexMatrix shifted =
      qmp::sample_covariance(x) - qmp::Complex(0.5, 1.0) * qmp::ComplexMatrix::Identity(12, 12);
  for (auto kind : {qmp::StructureKind::TypeI, qmp::StructureKind::TypeII, qmp::StructureKind::TypeIII}) {
    const double r = qmp::structure_residual(shifted, kind).residual;
    std::printf("psi(S) - zI  %-8s residual %.3e\n", std::string(qmp::to_string(kind)).c_str(), r);
    worst = std::max(worst, r);
  }
  if (skipped) std::printf("skipped %zu ill-conditioned draws\n", skipped);
  std::printf("%s\n", worst <= kTolerance ? "PASS" : "FAIL");
  return worst <= kTolerance ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternion sample covariance spectra and the Marcenko-Pastur law"};
  app.require_subcommand(1);

  ExperimentFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run one Monte Carlo experiment");
  sim_flags.attach(simulate, true);

  ExperimentFlags sweep_flags;
  std::string sizes_text;
  auto* sweep = app.add_subcommand("sweep", "Run experiments over several (p, n) sizes with a common ratio");
  sweep_flags.attach(sweep, true);
  sweep->add_option("--sizes", sizes_text, "Comma-separated PxN list, e.g. 50x100,100x200")->required();

  double y = 0.5, d_sigma2 = 1.0, from = 0.0, to = 0.0;
  std::size_t points = 101;
  auto* density = app.add_subcommand("density", "Print the limit density and distribution function");
  density->add_option("--y", y, "Ratio p/n");
  density->add_option("--sigma2", d_sigma2, "Scale parameter");
  density->add_option("--points", points, "Grid points");
  density->add_option("--from", from, "Grid start");
  density->add_option("--to", to, "Grid end (default 1.05 b)");

  ExperimentFlags st_flags;
  auto* stieltjes = app.add_subcommand("stieltjes", "Print m(z) and the empirical m_n(z) on a grid");
  st_flags.attach(stieltjes, false);

  std::size_t count = 200;
  std::uint64_t cs_seed = 1;
  auto* check = app.add_subcommand("check-structure", "Verify the Type-III inverse structure numerically");
  check->add_option("--count", count, "Random matrices per dimension");
  check->add_option("--seed", cs_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*simulate) {
      const auto report = qmp::run_experiment(sim_flags.build());
      print_report(report);
      return kExitOk;
    }
    if (*sweep) {
      const auto reports = qmp::run_sweep(sweep_flags.build(), parse_sizes(sizes_text));
      for (const auto& r : reports) print_report(r);
      std::printf("%s", qmp::sweep_summary_csv(reports).c_str());
      return kExitOk;
    }
    if (*density) return cmd_density(y, d_sigma2, points, from, to);
    if (*stieltjes) return cmd_stieltjes(st_flags.build());
    if (*check) return cmd_check_structure(count, cs_seed);
  } catch (const qmp::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const qmp::DomainError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const qmp::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const qmp::ContractError& e) {
    std::fprintf(stderr, "numerical contract violation: %s\n", e.what());
    return kExitNumerical;
  } catch (const qmp::InvertibilityError& e) {
    std::fprintf(stderr, "numerical contract violation: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
