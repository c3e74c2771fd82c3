#include "connsemble/report.hpp"

#include "connsemble/dataio.hpp"
#include "connsemble/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace connsemble {

namespace {

constexpr const char* kFormat = "connsemble-report";
constexpr int kFormatVersion = 1;

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["folds"] = c.folds;
  j["repetitions"] = c.repetitions;
  j["threshold"] = c.threshold;
  j["auc_mode"] = to_string(c.auc_mode);
  j["significance_unit"] = "fold";
  j["disconnected_policy"] = c.disconnected_policy;
  j["sampler"] = {{"method", to_string(c.sampler.method)},
                  {"mode", to_string(c.sampler_mode)},
                  {"k_neighbors", c.sampler.k_neighbors},
                  {"iht_internal_folds", c.sampler.iht_internal_folds},
                  {"feature_space", "minmax_fused"}};
  j["train"] = {{"hidden_layers", json::array({kHiddenUnits, kHiddenUnits})},
                {"l2_alpha", c.train.l2_alpha},
                {"lbfgs_history", c.train.lbfgs_history},
                {"max_iterations", c.train.max_iterations},
                {"gradient_tolerance", c.train.gradient_tolerance}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.folds = j.at("folds").get<int>();
  c.repetitions = j.at("repetitions").get<int>();
  c.threshold = j.at("threshold").get<double>();
  c.auc_mode = auc_mode_from_string(j.at("auc_mode").get<std::string>());
  c.disconnected_policy = j.at("disconnected_policy").get<std::string>();
  const json& s = j.at("sampler");
  c.sampler.method = sampler_from_string(s.at("method").get<std::string>());
  c.sampler_mode = sampler_mode_from_string(s.at("mode").get<std::string>());
  c.sampler.k_neighbors = s.at("k_neighbors").get<int>();
  c.sampler.iht_internal_folds = s.at("iht_internal_folds").get<int>();
  const json& t = j.at("train");
  c.train.l2_alpha = t.at("l2_alpha").get<double>();
  c.train.lbfgs_history = t.at("lbfgs_history").get<int>();
  c.train.max_iterations = t.at("max_iterations").get<int>();
  c.train.gradient_tolerance = t.at("gradient_tolerance").get<double>();
  c.sampler.iht_train_config = c.train;
  return c;
}

json counts_to_json(const CohortCounts& c) { return {{"subjects", c.subjects}, {"hc", c.hc}, {"mci", c.mci}}; }

CohortCounts counts_from_json(const json& j) {
  return {j.at("subjects").get<std::size_t>(), j.at("hc").get<std::size_t>(), j.at("mci").get<std::size_t>()};
}

void write_text(const fs::path& path, const std::string& text, bool overwrite) {
  ensure_writable(path, overwrite);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) raise(Errc::io_error, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) raise(Errc::io_error, "failed writing " + path.string());
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  json j;
  j["format"] = kFormat;
  j["version"] = kFormatVersion;
  j["config"] = config_to_json(report.config);
  j["cohort"] = {{"input", counts_to_json(report.input)}, {"evaluated", counts_to_json(report.evaluated)}};
  json strategies = json::object();
  for (Strategy s : kStrategies) {
    json metrics = json::object();
    for (Metric m : kMetrics) {
      const MetricSummary& sum = report.at(s, m);
      metrics[std::string(to_string(m))] = {
          {"mean", sum.mean}, {"se", sum.standard_error}, {"n_folds", sum.n}, {"values", report.samples(s, m)}};
    }
    strategies[std::string(to_string(s))] = std::move(metrics);
  }
  j["strategies"] = std::move(strategies);
  json tests = json::array();
  for (const auto& t : report.tests)
    tests.push_back({{"metric", to_string(t.metric)}, {"a", to_string(t.a)}, {"b", to_string(t.b)}, {"u", t.u}, {"p", t.p}});
  j["pairwise_tests"] = std::move(tests);
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
  EvaluationReport r;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) raise(Errc::parse_error, "not a connsemble report");
    if (j.at("version").get<int>() != kFormatVersion) raise(Errc::parse_error, "unsupported report version");
    r.config = config_from_json(j.at("config"));
    r.input = counts_from_json(j.at("cohort").at("input"));
    r.evaluated = counts_from_json(j.at("cohort").at("evaluated"));
    const json& strategies = j.at("strategies");
    for (Strategy s : kStrategies) {
      const json& metrics = strategies.at(std::string(to_string(s)));
      for (Metric m : kMetrics) {
        const json& entry = metrics.at(std::string(to_string(m)));
        auto& sum = r.summary[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
        sum.mean = entry.at("mean").get<double>();
        sum.standard_error = entry.at("se").get<double>();
        sum.n = entry.at("n_folds").get<std::size_t>();
        r.values[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] =
            entry.at("values").get<std::vector<double>>();
      }
    }
    for (const json& t : j.at("pairwise_tests"))
      r.tests.push_back({metric_from_string(t.at("metric").get<std::string>()),
                         strategy_from_string(t.at("a").get<std::string>()),
                         strategy_from_string(t.at("b").get<std::string>()), t.at("u").get<double>(),
                         t.at("p").get<double>()});
  } catch (const json::exception& e) {
    raise(Errc::parse_error, std::string("malformed report: ") + e.what());
  }
  return r;
}

void export_report(const EvaluationReport& report, const fs::path& path, bool overwrite) {
  write_text(path, report_to_json(report), overwrite);
}

EvaluationReport import_report(const fs::path& path) {
  if (!fs::exists(path)) raise(Errc::file_not_found, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

void export_fold_values(const EvaluationReport& report, const fs::path& path, bool overwrite) {
  std::ostringstream out;
  out << "strategy,metric,index,value\n";
  for (Strategy s : kStrategies)
    for (Metric m : kMetrics) {
      const auto& v = report.samples(s, m);
      for (std::size_t i = 0; i < v.size(); ++i)
        out << to_string(s) << ',' << to_string(m) << ',' << i << ',' << format_double(v[i]) << '\n';
    }
  write_text(path, out.str(), overwrite);
}

std::string comparison_table(const std::vector<ReportComparison>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-12s %10s %10s %10s %12s\n", "strategy", "metric", "mean_a", "mean_b", "U",
                "p");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-12s %10.4f %10.4f %10.1f %12.4g\n",
                  std::string(to_string(r.strategy)).c_str(), std::string(to_string(r.metric)).c_str(), r.mean_a,
                  r.mean_b, r.u, r.p);
    out << line;
  }
  return out.str();
}

}  // namespace connsemble
