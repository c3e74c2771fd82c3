#include "connsemble/connsemble.h"
#include "tempdir.hpp"

#include <doctest.h>

#include <fstream>
#include <string>

namespace {

connsemble_synth_config tiny(std::uint64_t seed) {
  connsemble_synth_config cfg;
  connsemble_synth_config_init(&cfg);
  cfg.n_nodes = 10;
  cfg.n_hc = 8;
  cfg.n_mci = 12;
  cfg.effect_size = 0.5;
  cfg.seed = seed;
  return cfg;
}

connsemble_eval_options quick() {
  connsemble_eval_options o;
  connsemble_eval_options_init(&o);
  o.folds = 4;
  o.repeats = 2;
  o.max_iterations = 30;
  return o;
}

}  // namespace

TEST_CASE("defaults") {
  connsemble_eval_options o;
  connsemble_eval_options_init(&o);
  CHECK(std::string(o.sampler) == "none");
  CHECK(o.folds == 10);
  CHECK(o.repeats == 10);
  CHECK(o.l2_alpha == 1e-4);
  CHECK(o.max_iterations == 200);
  CHECK(o.threshold == 0.5);
  CHECK(o.k_neighbors == 3);
  connsemble_synth_config s;
  connsemble_synth_config_init(&s);
  CHECK(s.n_nodes == 120);
  CHECK(s.n_hc == 49);
  CHECK(s.n_mci == 108);
  CHECK(std::string(connsemble_version()).size() > 0);
}

TEST_CASE("synthesize, load, evaluate, write, read, compare") {
  TempDir dir;
  const auto cfg = tiny(3);
  REQUIRE(connsemble_synthesize(&cfg, (dir / "cohort").c_str(), 0) == CONNSEMBLE_OK);
  CHECK(connsemble_synthesize(&cfg, (dir / "cohort").c_str(), 0) == CONNSEMBLE_ERR_IO);
  CHECK(std::string(connsemble_last_error_kind()) == "FileExists");

  connsemble_cohort* cohort = nullptr;
  REQUIRE(connsemble_cohort_load((dir / "cohort/manifest.csv").c_str(), nullptr, &cohort) == CONNSEMBLE_OK);
  CHECK(std::string(connsemble_last_error()).empty());
  CHECK(connsemble_cohort_size(cohort) == 20);
  CHECK(connsemble_cohort_count(cohort, 0) == 8);
  CHECK(connsemble_cohort_count(cohort, 1) == 12);
  CHECK(connsemble_cohort_feature_dim(cohort) == 45);

  REQUIRE(connsemble_cohort_write_features(cohort, (dir / "store").c_str(), 0) == CONNSEMBLE_OK);
  connsemble_cohort* stored = nullptr;
  REQUIRE(connsemble_cohort_load_features((dir / "store").c_str(), &stored) == CONNSEMBLE_OK);
  CHECK(connsemble_cohort_size(stored) == 20);

  const auto opts = quick();
  connsemble_report* a = nullptr;
  connsemble_report* b = nullptr;
  REQUIRE(connsemble_evaluate(cohort, &opts, &a) == CONNSEMBLE_OK);
  REQUIRE(connsemble_evaluate(stored, &opts, &b) == CONNSEMBLE_OK);

  double mean = -1, se = -1;
  size_t n = 0;
  REQUIRE(connsemble_report_metric(a, "ensemble", "auc", &mean, &se, &n) == CONNSEMBLE_OK);
  CHECK(n == 8);
  CHECK(mean >= 0.0);
  CHECK(mean <= 1.0);
  CHECK(connsemble_report_metric(a, "ensemble", "kappa", &mean, &se, &n) == CONNSEMBLE_ERR_USAGE);

  REQUIRE(connsemble_report_write(a, (dir / "a.json").c_str(), 0) == CONNSEMBLE_OK);
  CHECK(connsemble_report_write(a, (dir / "a.json").c_str(), 0) == CONNSEMBLE_ERR_IO);
  REQUIRE(connsemble_report_write_folds(a, (dir / "a.csv").c_str(), 0) == CONNSEMBLE_OK);
  connsemble_report* read = nullptr;
  REQUIRE(connsemble_report_read((dir / "a.json").c_str(), &read) == CONNSEMBLE_OK);

  connsemble_comparison* cmp = nullptr;
  REQUIRE(connsemble_compare(a, read, &cmp) == CONNSEMBLE_OK);
  CHECK(connsemble_comparison_size(cmp) == 25);
  const char* strategy = nullptr;
  const char* metric = nullptr;
  double ma = 0, mb = 0, u = 0, p = 0;
  REQUIRE(connsemble_comparison_row(cmp, 0, &strategy, &metric, &ma, &mb, &u, &p) == CONNSEMBLE_OK);
  CHECK(std::string(strategy) == "weights");
  CHECK(std::string(metric) == "accuracy");
  CHECK(ma == mb);
  CHECK(p == 1.0);
  CHECK(connsemble_comparison_row(cmp, 25, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        CONNSEMBLE_ERR_USAGE);
  CHECK(std::string(connsemble_comparison_table(cmp)).find("ensemble") != std::string::npos);

  connsemble_comparison_free(cmp);
  connsemble_report_free(read);
  connsemble_report_free(a);
  connsemble_report_free(b);
  connsemble_cohort_free(stored);
  connsemble_cohort_free(cohort);
}

TEST_CASE("error mapping") {
  TempDir dir;
  connsemble_cohort* cohort = nullptr;
  CHECK(connsemble_cohort_load((dir / "none.csv").c_str(), nullptr, &cohort) == CONNSEMBLE_ERR_IO);
  CHECK(cohort == nullptr);
  CHECK(std::string(connsemble_last_error_kind()) == "FileNotFound");

  std::ofstream(dir / "m.csv") << "0,-1\n-1,0\n";
  std::ofstream(dir / "manifest.csv") << "subject_id,label,path\nx,HC,m.csv\n";
  CHECK(connsemble_cohort_load((dir / "manifest.csv").c_str(), nullptr, &cohort) == CONNSEMBLE_ERR_DATA);
  CHECK(std::string(connsemble_last_error_kind()) == "NegativeWeight");

  std::ofstream(dir / "iso.csv") << "0,1,0\n1,0,0\n0,0,0\n";
  std::ofstream(dir / "manifest2.csv") << "subject_id,label,path\nx,HC,iso.csv\n";
  connsemble_load_options lo;
  connsemble_load_options_init(&lo);
  lo.disconnected_policy = "error";
  CHECK(connsemble_cohort_load((dir / "manifest2.csv").c_str(), &lo, &cohort) == CONNSEMBLE_ERR_DATA);
  CHECK(std::string(connsemble_last_error_kind()) == "DisconnectedPair");
  lo.disconnected_policy = "bogus";
  CHECK(connsemble_cohort_load((dir / "manifest2.csv").c_str(), &lo, &cohort) == CONNSEMBLE_ERR_USAGE);

  std::ofstream(dir / "zero.csv") << "0,0\n0,0\n";
  std::ofstream(dir / "manifest3.csv") << "subject_id,label,path\nx,HC,zero.csv\n";
  CHECK(connsemble_cohort_load((dir / "manifest3.csv").c_str(), nullptr, &cohort) == CONNSEMBLE_ERR_NUMERICAL);
  CHECK(std::string(connsemble_last_error_kind()) == "AllPairsDisconnected");

  CHECK(connsemble_cohort_load(nullptr, nullptr, &cohort) == CONNSEMBLE_ERR_USAGE);

  const auto cfg = tiny(1);
  REQUIRE(connsemble_cohort_synthesize(&cfg, nullptr, &cohort) == CONNSEMBLE_OK);
  auto opts = quick();
  opts.sampler = "smote";
  connsemble_report* rep = nullptr;
  CHECK(connsemble_evaluate(cohort, &opts, &rep) == CONNSEMBLE_ERR_USAGE);
  CHECK(rep == nullptr);
  opts = quick();
  opts.folds = 9;  // only 8 HC
  CHECK(connsemble_evaluate(cohort, &opts, &rep) == CONNSEMBLE_ERR_DATA);
  CHECK(std::string(connsemble_last_error_kind()) == "ClassSmallerThanK");
  connsemble_cohort_free(cohort);

  // Freeing null handles is a no-op; size queries on null are 0.
  connsemble_cohort_free(nullptr);
  connsemble_report_free(nullptr);
  connsemble_comparison_free(nullptr);
  CHECK(connsemble_cohort_size(nullptr) == 0);
}
