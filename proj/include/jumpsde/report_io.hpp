#pragma once

// Artifact writers. Numbers are printed with 17 significant digits so that
// identical runs produce identical bytes.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jumpsde/error.hpp"
#include "jumpsde/fiber.hpp"
#include "jumpsde/harness.hpp"

namespace jumpsde {

using Json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Four significant digits, for human-facing messages only.
inline std::string format_brief(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// JSON has no NaN; unavailable values become null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row_strings(header);
  }

  /// Cells are numbers or preformatted strings.
  template <class... Cells>
  void row(const Cells&... cells) {
    require(sizeof...(cells) == columns_, "CsvWriter: row width does not match the header");
    std::string line;
    bool first = true;
    ((line += (first ? "" : ","), line += cell(cells), first = false), ...);
    out_ << line << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(unsigned long v) { return std::to_string(v); }
  static std::string cell(unsigned long long v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }

  std::size_t columns_;
  std::ostringstream out_;
};

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

/// `<out_dir>/<name>`; an empty name becomes <UTC timestamp>_seed<seed>.
inline std::filesystem::path make_run_dir(const std::filesystem::path& out_dir, std::string name,
                                          std::uint64_t seed) {
  if (name.empty()) {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
    name = std::string(buf) + "_seed" + std::to_string(seed);
  }
  const auto dir = out_dir / name;
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Report serialisation

inline std::string error_reports_csv(const std::vector<ErrorReport>& reports) {
  CsvWriter csv({"series", "norm", "abscissa", "n", "estimate", "stderr", "signed_bias"});
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
      const double bias = k < r.signed_bias.size() ? r.signed_bias[k] : std::nan("");
      csv.row(r.label, r.norm, r.abscissae[k], r.steps[k], r.estimates[k], r.std_errors[k], bias);
    }
  }
  return csv.str();
}

inline Json error_report_json(const ErrorReport& r) {
  Json j;
  j["series"] = r.label;
  j["norm"] = r.norm;
  j["abscissa"] = r.kind == Abscissa::steps ? "n" : "eps";
  j["fitted_slope"] = json_number(r.fitted_slope);
  j["slope_ci"] = {json_number(r.slope_ci.first), json_number(r.slope_ci.second)};
  j["predicted_slope"] = json_number(r.predicted_slope);
  j["paths"] = r.paths;
  j["excluded_paths"] = r.excluded_paths;
  return j;
}

inline std::string wasserstein_csv(const WassersteinReport& r) {
  CsvWriter csv({"eps", "w", "half_width", "bound_ratio", "gaussian_sd", "mean_jumps"});
  for (const auto& p : r.points) {
    csv.row(p.eps, p.distance, p.half_width, p.bound_ratio, p.gaussian_sd, p.mean_jumps);
  }
  return csv.str();
}

inline std::string fiber_histogram_csv(const FiberReport& r) {
  CsvWriter csv({"bin_center", "density", "snapshot_t"});
  for (const auto& s : r.snapshots) {
    for (std::size_t b = 0; b < r.bin_centers.size(); ++b) csv.row(r.bin_centers[b], s.density[b], s.t);
  }
  return csv.str();
}

inline Json fiber_stats_json(const FiberReport& r, std::span<const double> noise_variance) {
  Json snaps = Json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const auto& s = r.snapshots[k];
    Json j;
    j["t"] = s.t;
    j["mean"] = s.mean;
    j["variance"] = s.variance;
    j["variance_half_width"] = s.variance_half_width;
    j["skewness"] = s.skewness;
    j["excess_kurtosis"] = s.excess_kurtosis;
    if (k < noise_variance.size()) j["noise_variance"] = noise_variance[k];
    snaps.push_back(j);
  }
  Json out;
  out["snapshots"] = snaps;
  out["paths"] = r.paths;
  out["excluded_paths"] = r.excluded_paths;
  return out;
}

}  // namespace jumpsde
