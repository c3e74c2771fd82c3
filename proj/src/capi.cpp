#include "connsemble/connsemble.h"

#include "connsemble/dataio.hpp"
#include "connsemble/error.hpp"
#include "connsemble/evaluation.hpp"
#include "connsemble/report.hpp"
#include "connsemble/synthetic.hpp"

#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

using namespace connsemble;

struct connsemble_cohort {
  LabeledCohort cohort;
  std::string disconnected_policy;
};

struct connsemble_report {
  EvaluationReport report;
};

struct connsemble_comparison {
  std::vector<ReportComparison> rows;
  std::string table;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_error_kind;

void clear_error() {
  last_error.clear();
  last_error_kind.clear();
}

connsemble_status status_of(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return CONNSEMBLE_ERR_USAGE;
    case ErrorCategory::data: return CONNSEMBLE_ERR_DATA;
    case ErrorCategory::numerical: return CONNSEMBLE_ERR_NUMERICAL;
    case ErrorCategory::io: return CONNSEMBLE_ERR_IO;
  }
  return CONNSEMBLE_ERR_INTERNAL;
}

template <class Fn>
connsemble_status guarded(Fn&& fn) {
  clear_error();
  try {
    fn();
    return CONNSEMBLE_OK;
  } catch (const Error& e) {
    last_error = e.what();
    last_error_kind = std::string(to_string(e.code()));
    return status_of(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    last_error_kind = "IoError";
    return CONNSEMBLE_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    last_error_kind = "OutOfMemory";
    return CONNSEMBLE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    last_error_kind = "Internal";
    return CONNSEMBLE_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) raise(Errc::invalid_argument, std::string(what) + " is NULL");
}

LoadOptions load_options_from(const connsemble_load_options* o) {
  LoadOptions lo;
  if (o == nullptr) return lo;
  lo.symmetry_tolerance = o->symmetry_tolerance;
  if (o->disconnected_policy != nullptr) lo.extraction.disconnected = DisconnectedPolicy::parse(o->disconnected_policy);
  lo.threads = o->threads;
  if (lo.threads < 1) raise(Errc::invalid_config, "threads must be >= 1");
  return lo;
}

SyntheticCohortConfig synth_from(const connsemble_synth_config* c) {
  SyntheticCohortConfig s;
  s.n_nodes = c->n_nodes;
  s.n_hc = c->n_hc;
  s.n_mci = c->n_mci;
  s.effect_size = c->effect_size;
  s.affected_edge_fraction = c->affected_edge_fraction;
  s.noise_scale = c->noise_scale;
  s.edge_density = c->edge_density;
  s.seed = c->seed;
  return s;
}

}  // namespace

extern "C" {

const char* connsemble_version(void) { return "0.1.0"; }
const char* connsemble_last_error(void) { return last_error.c_str(); }
const char* connsemble_last_error_kind(void) { return last_error_kind.c_str(); }

void connsemble_load_options_init(connsemble_load_options* options) {
  if (options == nullptr) return;
  options->symmetry_tolerance = kDefaultSymmetryTolerance;
  options->disconnected_policy = nullptr;
  options->threads = 1;
}

connsemble_status connsemble_cohort_load(const char* manifest_path, const connsemble_load_options* options,
                                         connsemble_cohort** out) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out, "out");
    *out = nullptr;
    const LoadOptions lo = load_options_from(options);
    auto handle = std::make_unique<connsemble_cohort>();
    handle->cohort = load_cohort(manifest_path, lo);
    handle->disconnected_policy = lo.extraction.disconnected.to_string();
    *out = handle.release();
  });
}

connsemble_status connsemble_cohort_load_features(const char* dir, connsemble_cohort** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto handle = std::make_unique<connsemble_cohort>();
    handle->cohort = read_feature_store(dir);
    handle->disconnected_policy = "feature_store";
    *out = handle.release();
  });
}

connsemble_status connsemble_cohort_write_features(const connsemble_cohort* cohort, const char* dir, int overwrite) {
  return guarded([&] {
    require(cohort, "cohort");
    require(dir, "dir");
    write_feature_store(cohort->cohort, dir, overwrite != 0);
  });
}

size_t connsemble_cohort_size(const connsemble_cohort* cohort) {
  return cohort == nullptr ? 0 : cohort->cohort.labels.size();
}

size_t connsemble_cohort_feature_dim(const connsemble_cohort* cohort) {
  return cohort == nullptr ? 0 : static_cast<size_t>(cohort->cohort.feature_dim());
}

size_t connsemble_cohort_count(const connsemble_cohort* cohort, int label) {
  if (cohort == nullptr || (label != 0 && label != 1)) return 0;
  return static_cast<size_t>(cohort->cohort.count(static_cast<Diagnosis>(label)));
}

void connsemble_cohort_free(connsemble_cohort* cohort) { delete cohort; }

void connsemble_synth_config_init(connsemble_synth_config* config) {
  if (config == nullptr) return;
  const SyntheticCohortConfig d;
  config->n_nodes = static_cast<int>(d.n_nodes);
  config->n_hc = static_cast<int>(d.n_hc);
  config->n_mci = static_cast<int>(d.n_mci);
  config->effect_size = d.effect_size;
  config->affected_edge_fraction = d.affected_edge_fraction;
  config->noise_scale = d.noise_scale;
  config->edge_density = d.edge_density;
  config->seed = d.seed;
}

connsemble_status connsemble_synthesize(const connsemble_synth_config* config, const char* out_dir, int overwrite) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    materialize_synthetic_cohort(synth_from(config), out_dir, overwrite != 0);
  });
}

connsemble_status connsemble_cohort_synthesize(const connsemble_synth_config* config,
                                               const connsemble_load_options* options, connsemble_cohort** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    const LoadOptions lo = load_options_from(options);
    auto handle = std::make_unique<connsemble_cohort>();
    handle->cohort = generate_synthetic_cohort(synth_from(config), lo.extraction, lo.threads);
    handle->disconnected_policy = lo.extraction.disconnected.to_string();
    *out = handle.release();
  });
}

void connsemble_eval_options_init(connsemble_eval_options* options) {
  if (options == nullptr) return;
  const ExperimentConfig d;
  options->sampler = "none";
  options->sampler_mode = "dataset";
  options->auc_mode = "per_fold";
  options->folds = d.folds;
  options->repeats = d.repetitions;
  options->seed = d.seed;
  options->l2_alpha = d.train.l2_alpha;
  options->max_iterations = d.train.max_iterations;
  options->lbfgs_history = d.train.lbfgs_history;
  options->gradient_tolerance = d.train.gradient_tolerance;
  options->threshold = d.threshold;
  options->k_neighbors = d.sampler.k_neighbors;
  options->iht_internal_folds = d.sampler.iht_internal_folds;
  options->threads = d.threads;
}

connsemble_status connsemble_evaluate(const connsemble_cohort* cohort, const connsemble_eval_options* options,
                                      connsemble_report** out) {
  return guarded([&] {
    require(cohort, "cohort");
    require(out, "out");
    *out = nullptr;
    connsemble_eval_options o;
    connsemble_eval_options_init(&o);
    if (options != nullptr) o = *options;

    ExperimentConfig cfg;
    cfg.sampler.method = sampler_from_string(o.sampler != nullptr ? o.sampler : "none");
    cfg.sampler_mode = sampler_mode_from_string(o.sampler_mode != nullptr ? o.sampler_mode : "dataset");
    cfg.auc_mode = auc_mode_from_string(o.auc_mode != nullptr ? o.auc_mode : "per_fold");
    cfg.folds = o.folds;
    cfg.repetitions = o.repeats;
    cfg.seed = o.seed;
    cfg.train.l2_alpha = o.l2_alpha;
    cfg.train.max_iterations = o.max_iterations;
    cfg.train.lbfgs_history = o.lbfgs_history;
    cfg.train.gradient_tolerance = o.gradient_tolerance;
    cfg.threshold = o.threshold;
    cfg.sampler.k_neighbors = o.k_neighbors;
    cfg.sampler.iht_internal_folds = o.iht_internal_folds;
    cfg.sampler.iht_train_config = cfg.train;
    cfg.threads = o.threads;
    cfg.disconnected_policy = cohort->disconnected_policy;

    auto handle = std::make_unique<connsemble_report>();
    handle->report = run_experiment(cohort->cohort, cfg);
    *out = handle.release();
  });
}

connsemble_status connsemble_report_write(const connsemble_report* report, const char* path, int overwrite) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    export_report(report->report, path, overwrite != 0);
  });
}

connsemble_status connsemble_report_write_folds(const connsemble_report* report, const char* path, int overwrite) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    export_fold_values(report->report, path, overwrite != 0);
  });
}

connsemble_status connsemble_report_read(const char* path, connsemble_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto handle = std::make_unique<connsemble_report>();
    handle->report = import_report(path);
    *out = handle.release();
  });
}

connsemble_status connsemble_report_metric(const connsemble_report* report, const char* strategy, const char* metric,
                                           double* mean, double* se, size_t* n_folds) {
  return guarded([&] {
    require(report, "report");
    require(strategy, "strategy");
    require(metric, "metric");
    const MetricSummary& s = report->report.at(strategy_from_string(strategy), metric_from_string(metric));
    if (mean != nullptr) *mean = s.mean;
    if (se != nullptr) *se = s.standard_error;
    if (n_folds != nullptr) *n_folds = s.n;
  });
}

void connsemble_report_free(connsemble_report* report) { delete report; }

connsemble_status connsemble_compare(const connsemble_report* a, const connsemble_report* b,
                                     connsemble_comparison** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = nullptr;
    auto handle = std::make_unique<connsemble_comparison>();
    handle->rows = compare_reports(a->report, b->report);
    handle->table = comparison_table(handle->rows);
    *out = handle.release();
  });
}

size_t connsemble_comparison_size(const connsemble_comparison* cmp) { return cmp == nullptr ? 0 : cmp->rows.size(); }

connsemble_status connsemble_comparison_row(const connsemble_comparison* cmp, size_t index, const char** strategy,
                                            const char** metric, double* mean_a, double* mean_b, double* u,
                                            double* p) {
  return guarded([&] {
    require(cmp, "comparison");
    if (index >= cmp->rows.size()) raise(Errc::invalid_argument, "comparison row out of range");
    const ReportComparison& r = cmp->rows[index];
    if (strategy != nullptr) *strategy = to_string(r.strategy).data();
    if (metric != nullptr) *metric = to_string(r.metric).data();
    if (mean_a != nullptr) *mean_a = r.mean_a;
    if (mean_b != nullptr) *mean_b = r.mean_b;
    if (u != nullptr) *u = r.u;
    if (p != nullptr) *p = r.p;
  });
}

const char* connsemble_comparison_table(const connsemble_comparison* cmp) {
  return cmp == nullptr ? "" : cmp->table.c_str();
}

void connsemble_comparison_free(connsemble_comparison* cmp) { delete cmp; }

}  // extern "C"
