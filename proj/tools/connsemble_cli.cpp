// connsemble command-line front end. Talks to the library only through the C API.
#include "connsemble/connsemble.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int exit_code(connsemble_status s) {
  switch (s) {
    case CONNSEMBLE_OK: return kOk;
    case CONNSEMBLE_ERR_USAGE: return kUsage;
    case CONNSEMBLE_ERR_NUMERICAL: return kNumerical;
    default: return kData;  // data, I/O, anything unexpected
  }
}

struct Failure {
  connsemble_status status;
};

void check(connsemble_status s) {
  if (s != CONNSEMBLE_OK) throw Failure{s};
}

struct CohortDeleter {
  void operator()(connsemble_cohort* c) const { connsemble_cohort_free(c); }
};
struct ReportDeleter {
  void operator()(connsemble_report* r) const { connsemble_report_free(r); }
};
struct ComparisonDeleter {
  void operator()(connsemble_comparison* c) const { connsemble_comparison_free(c); }
};
using CohortPtr = std::unique_ptr<connsemble_cohort, CohortDeleter>;
using ReportPtr = std::unique_ptr<connsemble_report, ReportDeleter>;
using ComparisonPtr = std::unique_ptr<connsemble_comparison, ComparisonDeleter>;

CohortPtr load(const std::string& manifest, const std::string& features, const std::string& disconnected,
               double tolerance, int threads) {
  connsemble_cohort* raw = nullptr;
  if (!features.empty()) {
    check(connsemble_cohort_load_features(features.c_str(), &raw));
  } else {
    connsemble_load_options lo;
    connsemble_load_options_init(&lo);
    lo.disconnected_policy = disconnected.c_str();
    lo.symmetry_tolerance = tolerance;
    lo.threads = threads;
    check(connsemble_cohort_load(manifest.c_str(), &lo, &raw));
  }
  return CohortPtr(raw);
}

void print_counts(const connsemble_cohort* c) {
  std::fprintf(stderr, "cohort: %zu subjects (%zu HC, %zu MCI), %zu features per measure\n",
               connsemble_cohort_size(c), connsemble_cohort_count(c, 0), connsemble_cohort_count(c, 1),
               connsemble_cohort_feature_dim(c));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connectome ensemble classification of MCI versus healthy controls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(connsemble_version()));

  // synth
  connsemble_synth_config synth;
  connsemble_synth_config_init(&synth);
  std::string synth_out;
  bool synth_overwrite = false;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic cohort (matrices + manifest)");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--nodes", synth.n_nodes, "Nodes per connectome")->capture_default_str();
  synth_cmd->add_option("--n-hc", synth.n_hc, "Healthy controls")->capture_default_str();
  synth_cmd->add_option("--n-mci", synth.n_mci, "MCI subjects")->capture_default_str();
  synth_cmd->add_option("--effect-size", synth.effect_size, "Weight reduction on affected edges")
      ->capture_default_str();
  synth_cmd->add_option("--affected-fraction", synth.affected_edge_fraction, "Fraction of edges affected")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise_scale, "Log-scale per-subject noise")->capture_default_str();
  synth_cmd->add_option("--density", synth.edge_density, "Base graph edge density")->capture_default_str();
  synth_cmd->add_flag("--overwrite", synth_overwrite, "Replace existing files");

  // shared cohort options
  std::string manifest, features, disconnected = "max_finite";
  double tolerance = 1e-9;
  int threads = 1;
  bool overwrite = false;

  // extract
  std::string extract_out;
  auto* extract_cmd = app.add_subcommand("extract", "Compute per-measure feature CSVs from a manifest");
  extract_cmd->add_option("--manifest", manifest, "Cohort manifest CSV")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--out", extract_out, "Feature store directory")->required();
  extract_cmd->add_option("--disconnected", disconnected, "max_finite | constant:<v> | error")
      ->capture_default_str();
  extract_cmd->add_option("--symmetry-tol", tolerance, "Relative symmetry tolerance")->capture_default_str();
  extract_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
  extract_cmd->add_flag("--overwrite", overwrite, "Replace existing files");

  // evaluate
  connsemble_eval_options eval;
  connsemble_eval_options_init(&eval);
  std::string sampler = eval.sampler, sampler_mode = eval.sampler_mode, auc_mode = eval.auc_mode;
  std::string report_out, dump_folds;
  auto* eval_cmd = app.add_subcommand("evaluate", "Repeated stratified cross-validation of all strategies");
  auto* src = eval_cmd->add_option_group("input");
  src->add_option("--manifest", manifest, "Cohort manifest CSV");
  src->add_option("--features", features, "Feature store directory written by extract");
  src->require_option(1);
  eval_cmd->add_option("--sampler", sampler, "Under-sampling strategy")
      ->check(CLI::IsMember({"none", "random", "nearmiss3", "iht"}))
      ->capture_default_str();
  eval_cmd->add_option("--sampler-mode", sampler_mode, "Apply sampler once to the dataset or per training fold")
      ->check(CLI::IsMember({"dataset", "fold"}))
      ->capture_default_str();
  eval_cmd->add_option("--auc-mode", auc_mode, "AUC per fold or pooled over each repetition")
      ->check(CLI::IsMember({"per_fold", "pooled"}))
      ->capture_default_str();
  eval_cmd->add_option("--folds", eval.folds, "Folds per repetition")->capture_default_str();
  eval_cmd->add_option("--repeats", eval.repeats, "Repetitions")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Master seed")->capture_default_str();
  eval_cmd->add_option("--alpha", eval.l2_alpha, "L2 penalty")->capture_default_str();
  eval_cmd->add_option("--max-iter", eval.max_iterations, "L-BFGS iteration cap")->capture_default_str();
  eval_cmd->add_option("--threshold", eval.threshold, "Decision threshold")->capture_default_str();
  eval_cmd->add_option("--k-neighbors", eval.k_neighbors, "Near-miss neighbours")->capture_default_str();
  eval_cmd->add_option("--disconnected", disconnected, "max_finite | constant:<v> | error")
      ->capture_default_str();
  eval_cmd->add_option("--symmetry-tol", tolerance, "Relative symmetry tolerance")->capture_default_str();
  eval_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
  eval_cmd->add_option("--out", report_out, "Report JSON path (stdout if omitted)");
  eval_cmd->add_option("--dump-folds", dump_folds, "Also write per-fold metric values as CSV");
  eval_cmd->add_flag("--overwrite", overwrite, "Replace existing files");

  // compare
  std::string report_a, report_b, compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Mann-Whitney comparison of two reports");
  compare_cmd->add_option("report_a", report_a, "First report")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("report_b", report_b, "Second report")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", compare_out, "Write the table to a file instead of stdout");
  compare_cmd->add_flag("--overwrite", overwrite, "Replace an existing output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth_cmd) {
      check(connsemble_synthesize(&synth, synth_out.c_str(), synth_overwrite ? 1 : 0));
      std::fprintf(stderr, "wrote %d HC + %d MCI connectomes to %s\n", synth.n_hc, synth.n_mci, synth_out.c_str());
    } else if (*extract_cmd) {
      CohortPtr cohort = load(manifest, "", disconnected, tolerance, threads);
      print_counts(cohort.get());
      check(connsemble_cohort_write_features(cohort.get(), extract_out.c_str(), overwrite ? 1 : 0));
    } else if (*eval_cmd) {
      CohortPtr cohort = load(manifest, features, disconnected, tolerance, threads);
      print_counts(cohort.get());
      eval.sampler = sampler.c_str();
      eval.sampler_mode = sampler_mode.c_str();
      eval.auc_mode = auc_mode.c_str();
      eval.threads = threads;
      connsemble_report* raw = nullptr;
      check(connsemble_evaluate(cohort.get(), &eval, &raw));
      ReportPtr report(raw);
      if (!report_out.empty()) {
        check(connsemble_report_write(report.get(), report_out.c_str(), overwrite ? 1 : 0));
      } else {
        check(connsemble_report_write(report.get(), "/dev/stdout", 1));
      }
      if (!dump_folds.empty()) check(connsemble_report_write_folds(report.get(), dump_folds.c_str(), overwrite ? 1 : 0));
      static const char* strategies[] = {"weights", "shortest_path", "communicability", "fusion", "ensemble"};
      for (const char* s : strategies) {
        double mean = 0, se = 0;
        check(connsemble_report_metric(report.get(), s, "auc", &mean, &se, nullptr));
        std::fprintf(stderr, "%-16s auc %.4f +- %.4f\n", s, mean, se);
      }
    } else if (*compare_cmd) {
      connsemble_report *a = nullptr, *b = nullptr;
      check(connsemble_report_read(report_a.c_str(), &a));
      ReportPtr ra(a);
      check(connsemble_report_read(report_b.c_str(), &b));
      ReportPtr rb(b);
      connsemble_comparison* raw = nullptr;
      check(connsemble_compare(ra.get(), rb.get(), &raw));
      ComparisonPtr cmp(raw);
      const std::string table = connsemble_comparison_table(cmp.get());
      if (compare_out.empty()) {
        std::cout << table;
      } else {
        if (!overwrite && std::filesystem::exists(compare_out)) {
          std::fprintf(stderr, "error: FileExists: %s (use --overwrite)\n", compare_out.c_str());
          return kData;
        }
        std::FILE* f = std::fopen(compare_out.c_str(), "w");
        if (f == nullptr || std::fputs(table.c_str(), f) < 0) {
          if (f != nullptr) std::fclose(f);
          std::fprintf(stderr, "error: IoError: cannot write %s\n", compare_out.c_str());
          return kData;
        }
        std::fclose(f);
      }
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", connsemble_last_error());
    return exit_code(f.status);
  }
  return kOk;
}
