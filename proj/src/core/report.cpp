#include "chromoseg/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "chromoseg/error.hpp"

namespace chromoseg::report {

using metrics::ClassScope;
using metrics::Metric;

namespace {

nlohmann::json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

}  // namespace

nlohmann::json to_json(const metrics::MetricsReport& r) {
  nlohmann::json out;
  out["samples"] = r.samples;
  out["classes"] = r.classes;
  out["units"] = {{"ratios", "fraction"}, {"Hausdorff", "pixels"}};
  for (const auto scope : {ClassScope::kAll, ClassScope::kForeground}) {
    nlohmann::json agg;
    for (const Metric m : metrics::kAllMetrics) agg[metrics::metric_name(m)] = number_or_null(r.mean(m, scope));
    out[scope == ClassScope::kAll ? "mean_all_classes" : "mean_foreground_classes"] = agg;
  }
  nlohmann::json per_class = nlohmann::json::array();
  for (int c = 0; c < r.classes; ++c) {
    nlohmann::json entry{{"class", c}, {"absent_samples", r.absent[static_cast<std::size_t>(c)]}};
    nlohmann::json excluded;
    for (const Metric m : metrics::kAllMetrics) {
      if (m == Metric::kAccuracy) continue;
      const auto mi = static_cast<std::size_t>(m);
      entry[metrics::metric_name(m)] = number_or_null(r.per_class[mi][static_cast<std::size_t>(c)]);
      excluded[metrics::metric_name(m)] = r.excluded[mi][static_cast<std::size_t>(c)];
    }
    entry["excluded_undefined"] = excluded;
    per_class.push_back(entry);
  }
  out["per_class"] = per_class;
  out["confusion"] = confusion_to_json(r.confusion);
  return out;
}

nlohmann::json confusion_to_json(const metrics::ConfusionMatrix& cm) {
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json percent = nlohmann::json::array();
  const auto norm = cm.row_normalized();
  for (int t = 0; t < cm.classes(); ++t) {
    nlohmann::json crow = nlohmann::json::array();
    nlohmann::json prow = nlohmann::json::array();
    for (int p = 0; p < cm.classes(); ++p) {
      crow.push_back(cm.at(t, p));
      prow.push_back(100.0 * norm[static_cast<std::size_t>(t * cm.classes() + p)]);
    }
    counts.push_back(crow);
    percent.push_back(prow);
  }
  return {{"rows", "true class"}, {"columns", "predicted class"}, {"counts", counts},
          {"row_percent", percent}};
}

std::string csv_header() {
  std::string h = "run,scope";
  for (const Metric m : metrics::kAllMetrics) h += "," + metrics::metric_name(m);
  return h + "\n";
}

std::string csv_row(const std::string& run_name, const metrics::MetricsReport& r, ClassScope scope) {
  std::ostringstream os;
  os << run_name << ',' << (scope == ClassScope::kAll ? "all" : "foreground");
  os << std::fixed << std::setprecision(4);
  for (const Metric m : metrics::kAllMetrics) {
    const double v = r.mean(m, scope);
    os << ',';
    if (std::isnan(v)) continue;
    os << (m == Metric::kHausdorff ? v : 100.0 * v);
  }
  os << '\n';
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace chromoseg::report
