#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qmp/experiment.hpp"

namespace qmp {

using Json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Gaussian: return "gaussian";
    case DistributionKind::SignedUnits: return "signed-units";
    case DistributionKind::StudentT: return "student-t";
  }
  return "?";
}

inline DistributionKind parse_distribution_kind(const std::string& s) {
  if (s == "gaussian") return DistributionKind::Gaussian;
  if (s == "signed-units" || s == "signed_units") return DistributionKind::SignedUnits;
  if (s == "student-t" || s == "student_t") return DistributionKind::StudentT;
  throw ValidationError({"dist: unknown distribution '" + s + "'"});
}

inline Json distribution_to_json(const EntryDistribution& d) {
  Json j{{"kind", to_string(d.kind)}, {"sigma2", d.sigma2}};
  if (d.kind == DistributionKind::StudentT) j["df"] = d.df;
  if (d.shifted()) j["mu"] = {d.mu.a, d.mu.b, d.mu.c, d.mu.d};
  return j;
}

inline Json config_to_json(const ExperimentConfig& c) {
  Json z = Json::array();
  for (const auto& v : c.z_grid) z.push_back({v.real(), v.imag()});
  Json j{{"p", c.p},
         {"n", c.n},
         {"dist", distribution_to_json(c.dist)},
         {"replications", c.replications},
         {"seed", c.seed},
         {"z_grid", z}};
  j["eta"] = c.eta ? Json(*c.eta) : Json(nullptr);
  return j;
}

// Reads the keys written by config_to_json (plus optional "output_dir");
// missing keys keep the values of `base`.
inline ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {}) {
  std::vector<std::string> bad;
  auto read = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(target);
    } catch (const Json::exception& e) {
      bad.emplace_back(std::string(key) + ": " + e.what());
    }
  };
  if (!j.is_object()) throw ValidationError({"config: expected a JSON object"});
  read("p", base.p);
  read("n", base.n);
  read("replications", base.replications);
  read("seed", base.seed);
  read("output_dir", base.output_dir);
  if (j.contains("eta")) {
    if (j["eta"].is_null()) base.eta.reset();
    else if (j["eta"].is_number()) base.eta = j["eta"].get<double>();
    else bad.emplace_back("eta: expected number or null");
  }
  if (j.contains("dist")) {
    const Json& d = j["dist"];
    try {
      EntryDistribution dist;
      dist.kind = parse_distribution_kind(d.value("kind", std::string("gaussian")));
      dist.sigma2 = d.value("sigma2", 1.0);
      dist.df = d.value("df", 0.0);
      if (d.contains("mu")) {
        const auto mu = d["mu"].get<std::vector<double>>();
        if (mu.size() != 4) throw ValidationError({"dist.mu: expected four components"});
        dist.mu = {mu[0], mu[1], mu[2], mu[3]};
      }
      base.dist = dist;
    } catch (const ValidationError& e) {
      bad.insert(bad.end(), e.fields().begin(), e.fields().end());
    } catch (const Json::exception& e) {
      bad.emplace_back(std::string("dist: ") + e.what());
    }
  }
  if (j.contains("z_grid")) {
    try {
      base.z_grid.clear();
      for (const auto& z : j["z_grid"]) {
        const auto pair = z.get<std::vector<double>>();
        if (pair.size() != 2) throw ValidationError({"z_grid: each point must be [re, im]"});
        base.z_grid.emplace_back(pair[0], pair[1]);
      }
    } catch (const ValidationError& e) {
      bad.insert(bad.end(), e.fields().begin(), e.fields().end());
    } catch (const Json::exception& e) {
      bad.emplace_back(std::string("z_grid: ") + e.what());
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return base;
}

inline Json summary_to_json(const Summary& s) { return {{"median", s.median}, {"max", s.max}}; }

inline Json report_to_json(const ConvergenceReport& r) {
  Json per = Json::array();
  for (const auto& rep : r.per_replication) {
    per.push_back({{"replication", rep.replication},
                   {"seed", rep.seed},
                   {"ks", rep.ks},
                   {"levy", rep.levy},
                   {"atom_mass", rep.atom_mass},
                   {"replaced_count", rep.replaced_count},
                   {"stieltjes_errors", rep.stieltjes_errors}});
  }
  Json stieltjes = Json::array();
  for (std::size_t i = 0; i < r.stieltjes_errors.size(); ++i) {
    const Complex z = r.config.z_grid[i];
    Json s = summary_to_json(r.stieltjes_errors[i]);
    s["z"] = {z.real(), z.imag()};
    stieltjes.push_back(s);
  }
  const MPLaw law = r.config.limit_law();
  Json j{{"schema", kReportSchemaVersion},
         {"config", config_to_json(r.config)},
         {"limit_law", {{"y", law.y()}, {"sigma2", law.sigma2()}, {"a", law.lower()}, {"b", law.upper()}}},
         {"per_replication", per},
         {"aggregates",
          {{"ks", summary_to_json(r.ks)},
           {"levy", summary_to_json(r.levy)},
           {"atom_mass", summary_to_json(r.atom_mass)},
           {"stieltjes_errors", stieltjes}}}};
  j["runtime_seconds"] = r.config.record_runtime ? Json(r.runtime_seconds) : Json(nullptr);
  return j;
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

inline std::string eigenvalues_csv(const ConvergenceReport& r) {
  std::string s = "replication,index,lambda\n";
  for (const auto& rep : r.per_replication)
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
      s += std::to_string(rep.replication) + "," + std::to_string(i) + "," + format_g17(rep.eigenvalues[i]) + "\n";
  return s;
}

// Freedman-Diaconis bin count, at least 40.
inline std::size_t histogram_bins(std::vector<double> values) {
  constexpr std::size_t kMinBins = 40, kMaxBins = 400;
  if (values.size() < 2) return kMinBins;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double range = values.back() - values.front();
  if (!(iqr > 0.0) || !(range > 0.0)) return kMinBins;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
  const auto bins = static_cast<std::size_t>(std::ceil(range / width));
  return std::clamp(bins, kMinBins, kMaxBins);
}

// Density histogram of the pooled eigenvalues with the limit density overlaid.
inline std::string histogram_svg(const ConvergenceReport& r) {
  std::vector<double> values;
  for (const auto& rep : r.per_replication) values.insert(values.end(), rep.eigenvalues.begin(), rep.eigenvalues.end());
  const MPLaw law = r.config.limit_law();
  const std::size_t bins = histogram_bins(values);
  double lo = std::min(0.0, values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()));
  double hi = std::max(law.upper(), values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()));
  hi += 0.02 * (hi - lo);
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<double> heights(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    heights[std::min(b, bins - 1)] += 1.0;
  }
  for (double& h : heights) h /= static_cast<double>(values.size()) * width;

  constexpr int kCurvePoints = 400;
  std::vector<std::pair<double, double>> curve;
  double peak = 0.0;
  for (int i = 0; i <= kCurvePoints; ++i) {
    const double x = lo + (hi - lo) * i / kCurvePoints;
    const double g = mp_density(law, x);
    curve.emplace_back(x, g);
    peak = std::max(peak, g);
  }
  // Bars scale to the continuous part; the atom bin is clipped.
  double bar_peak = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const bool holds_origin = lo + width * b <= 0.0 && 0.0 < lo + width * (b + 1);
    if (!(law.has_atom() && holds_origin)) bar_peak = std::max(bar_peak, heights[b]);
  }
  const double ymax = 1.1 * std::max({peak, bar_peak, 1e-12});

  constexpr double W = 640, H = 400, M = 40;
  auto sx = [&](double x) { return M + (x - lo) / (hi - lo) * (W - 2 * M); };
  auto sy = [&](double y) { return H - M - std::min(y, ymax) / ymax * (H - 2 * M); };
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << " " << H << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<g fill=\"#8fb3d9\" stroke=\"#4a6f94\" stroke-width=\"0.5\">\n";
  for (std::size_t b = 0; b < bins; ++b) {
    if (heights[b] <= 0.0) continue;
    const double x0 = sx(lo + width * b), x1 = sx(lo + width * (b + 1)), y = sy(heights[b]);
    os << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << (x1 - x0) << "\" height=\"" << (H - M - y)
       << "\"/>\n";
  }
  os << "</g>\n<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (const auto& [x, g] : curve) os << sx(x) << "," << sy(g) << " ";
  os << "\"/>\n";
  os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << M << "\" y=\"" << H - 10 << "\" font-size=\"12\">" << lo << "</text>\n";
  os << "<text x=\"" << W - M << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"end\">" << hi
     << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">p=" << r.config.p
     << " n=" << r.config.n << " y=" << law.y() << " sigma2=" << law.sigma2() << " (" << bins << " bins)</text>\n";
  os << "</svg>\n";
  return os.str();
}

inline void write_report_files(const ConvergenceReport& report) {
  const std::filesystem::path dir(report.config.output_dir);
  ensure_directory(dir);
  const auto& f = report.config.formats;
  if (f.csv) write_text_file(dir / "eigenvalues.csv", eigenvalues_csv(report));
  if (f.json) write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
  if (f.svg) write_text_file(dir / "histogram.svg", histogram_svg(report));
}

inline std::string sweep_summary_csv(const std::vector<ConvergenceReport>& reports) {
  std::string s = "p,n,y_n,median_ks,median_levy\n";
  for (const auto& r : reports) {
    const double y = static_cast<double>(r.config.p) / static_cast<double>(r.config.n);
    s += std::to_string(r.config.p) + "," + std::to_string(r.config.n) + "," + format_g17(y) + "," +
         format_g17(r.ks.median) + "," + format_g17(r.levy.median) + "\n";
  }
  return s;
}

inline void write_sweep_summary(const std::string& output_dir, const std::vector<ConvergenceReport>& reports) {
  const std::filesystem::path dir(output_dir);
  ensure_directory(dir);
  write_text_file(dir / "sweep_summary.csv", sweep_summary_csv(reports));
}

}  // namespace qmp
