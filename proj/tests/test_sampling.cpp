#include "connsemble/error.hpp"
#include "connsemble/sampling.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace connsemble;

namespace {

LabeledCohort make_cohort(int hc, int mci, Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  LabeledCohort c;
  for (int i = 0; i < hc + mci; ++i) {
    c.subject_ids.push_back("s" + std::to_string(i));
    c.labels.push_back(i < hc ? 0 : 1);
  }
  std::shuffle(c.labels.begin(), c.labels.end(), rng);
  for (auto& f : c.features) {
    f.resize(hc + mci, dim);
    for (auto& v : f.reshaped()) v = g(rng);
  }
  // make row identity visible in every measure
  for (Index r = 0; r < hc + mci; ++r)
    for (auto& f : c.features) f(r, 0) = static_cast<double>(r);
  return c;
}

std::vector<std::size_t> of_class(const LabeledCohort& c, int label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    if (c.labels[i] == label) out.push_back(i);
  return out;
}

void check_balanced_subset(const LabeledCohort& in, const SamplingOutcome& out) {
  const std::size_t minority = std::min(in.count(Diagnosis::hc), in.count(Diagnosis::mci));
  CHECK(out.cohort.count(Diagnosis::hc) == minority);
  CHECK(out.cohort.count(Diagnosis::mci) == minority);
  CHECK(std::is_sorted(out.retained.begin(), out.retained.end()));
  const int minority_label = in.count(Diagnosis::hc) <= in.count(Diagnosis::mci) ? 0 : 1;
  for (std::size_t r : of_class(in, minority_label))
    CHECK(std::binary_search(out.retained.begin(), out.retained.end(), r));
  for (std::size_t k = 0; k < out.retained.size(); ++k) {
    const std::size_t r = out.retained[k];
    CHECK(out.cohort.subject_ids[k] == in.subject_ids[r]);
    CHECK(out.cohort.labels[k] == in.labels[r]);
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(out.cohort.features[m].row(static_cast<Index>(k)) == in.features[m].row(static_cast<Index>(r)));
  }
}

// Exhaustive oracle for the two-step near-miss-3 rule on tiny inputs: among all
// majority subsets of minority size, prefer the most short-listed members, then
// the largest total mean-distance score.
std::vector<std::size_t> near_miss_oracle(const Matrix& pts, const std::vector<int>& y, int k) {
  std::vector<std::size_t> mino, majo;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 0 ? mino : majo).push_back(i);
  auto dist = [&](std::size_t a, std::size_t b) { return (pts.row(a) - pts.row(b)).norm(); };

  std::set<std::size_t> shortlist;
  for (std::size_t a : mino) {
    std::vector<std::size_t> s = majo;
    std::sort(s.begin(), s.end(), [&](auto x, auto z) { return dist(a, x) < dist(a, z); });
    for (int t = 0; t < std::min<int>(k, static_cast<int>(s.size())); ++t) shortlist.insert(s[t]);
  }
  std::vector<double> score(y.size(), 0);
  const int km = std::min<int>(k, static_cast<int>(mino.size()));
  for (std::size_t b : majo) {
    std::vector<double> d;
    for (std::size_t a : mino) d.push_back(dist(a, b));
    std::sort(d.begin(), d.end());
    score[b] = std::accumulate(d.begin(), d.begin() + km, 0.0) / km;
  }

  std::vector<std::size_t> best;
  std::size_t best_listed = 0;
  double best_score = -1;
  std::vector<bool> pick(majo.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(mino.size()), true);
  do {
    std::vector<std::size_t> sel;
    std::size_t listed = 0;
    double total = 0;
    for (std::size_t i = 0; i < majo.size(); ++i)
      if (pick[i]) {
        sel.push_back(majo[i]);
        listed += shortlist.count(majo[i]);
        total += score[majo[i]];
      }
    if (listed > best_listed || (listed == best_listed && total > best_score)) {
      best = sel;
      best_listed = listed;
      best_score = total;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  best.insert(best.end(), mino.begin(), mino.end());
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace

TEST_CASE("sampler names") {
  CHECK(sampler_from_string("nearmiss3") == SamplerMethod::near_miss_3);
  CHECK(sampler_from_string("near_miss_3") == SamplerMethod::near_miss_3);
  CHECK(sampler_from_string("iht") == SamplerMethod::instance_hardness);
  CHECK(sampler_from_string("random") == SamplerMethod::random);
  CHECK(sampler_from_string("none") == SamplerMethod::none);
  CHECK_THROWS_AS(sampler_from_string("smote"), Error);
  for (auto m : {SamplerMethod::none, SamplerMethod::random, SamplerMethod::near_miss_3,
                 SamplerMethod::instance_hardness})
    CHECK(sampler_from_string(to_string(m)) == m);
}

TEST_CASE("random under-sampling") {
  const LabeledCohort c = make_cohort(49, 108, 5, 1);
  SamplerConfig cfg;
  cfg.method = SamplerMethod::random;
  cfg.seed = 4;
  const auto out = apply_sampler(c, cfg);
  check_balanced_subset(c, out);
  CHECK(out.cohort.size() == 98);
  CHECK(apply_sampler(c, cfg).retained == out.retained);
  cfg.seed = 5;
  CHECK(apply_sampler(c, cfg).retained != out.retained);

  const LabeledCohort bal = make_cohort(10, 10, 3, 2);
  CHECK(random_undersample(bal, 9).subject_ids == bal.subject_ids);

  const LabeledCohort single = make_cohort(0, 10, 3, 3);
  try {
    random_undersample(single, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::single_class_cohort);
  }
}

TEST_CASE("near-miss-3 matches the exhaustive oracle on 2-D toys") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 40; ++trial) {
    Matrix pts(11, 2);
    for (auto& v : pts.reshaped()) v = u(rng);
    std::vector<int> y(11, 1);
    y[2] = y[5] = y[9] = 0;  // 3 minority, 8 majority
    for (int k : {1, 2, 3}) {
      const auto got = select_near_miss_3(pts, y, k);
      CHECK(got == near_miss_oracle(pts, y, k));
    }
  }
}

TEST_CASE("near-miss-3 hand-placed toy") {
  // Minority at x = 0, 1, 2 on the axis; majority spread to the right.
  Matrix pts(11, 2);
  pts << 0, 0, 1, 0, 2, 0,  //
      2.5, 0, 3, 0, 3.5, 1, 5, 0, 6, 2, 8, 0, 0, 4, 20, 20;
  std::vector<int> y{0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const auto got = select_near_miss_3(pts, y, 3);
  CHECK(got == near_miss_oracle(pts, y, 3));
  CHECK(got.size() == 6);
}

TEST_CASE("near-miss-3 keeps a far-away majority point when there is room") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  Matrix pts(30, 3);
  for (auto& v : pts.reshaped()) v = g(rng);
  std::vector<int> y(30, 1);
  for (int i = 0; i < 8; ++i) y[i] = 0;
  pts.row(17) = Eigen::RowVector3d(1e6, -1e6, 1e6);

  // Every majority point is short-listed once k covers the whole majority.
  for (int k : {22, 40}) {
    const auto got = select_near_miss_3(pts, y, k);
    CHECK(std::binary_search(got.begin(), got.end(), std::size_t{17}));
    CHECK(got.size() == 16);
  }
  // Minority packed around one majority point: the short-list has a single
  // entry and the fill step ranks the far point first.
  for (int i = 0; i < 8; ++i) pts.row(i) = pts.row(25) + 1e-3 * Eigen::RowVector3d(g(rng), g(rng), g(rng));
  const auto got = select_near_miss_3(pts, y, 1);
  CHECK(std::binary_search(got.begin(), got.end(), std::size_t{17}));
  CHECK(std::binary_search(got.begin(), got.end(), std::size_t{25}));
}

TEST_CASE("near-miss-3 on a cohort") {
  const LabeledCohort c = make_cohort(12, 30, 4, 5);
  SamplerConfig cfg;
  cfg.method = SamplerMethod::near_miss_3;
  const auto out = apply_sampler(c, cfg);
  check_balanced_subset(c, out);
  const Matrix space = sampling_space(c);
  CHECK(space.cols() == 12);
  CHECK((space.array() >= 0).all());
  CHECK((space.array() <= 1).all());
  CHECK(out.retained == select_near_miss_3(space, c.labels, 3));
  CHECK(near_miss_3(c, 3).subject_ids == out.cohort.subject_ids);
  // k larger than the minority is clamped, not an error
  CHECK(near_miss_3(c, 50).size() == 24);
}

TEST_CASE("instance hardness removes planted flipped labels first") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 0.4);
  const int n_min = 12, n_maj = 36, flipped = 4;
  Matrix pts(n_min + n_maj, 2);
  std::vector<int> y(n_min + n_maj);
  for (int i = 0; i < n_min + n_maj; ++i) {
    y[i] = i < n_min ? 0 : 1;
    const bool in_minority_blob = i < n_min || i >= n_min + n_maj - flipped;
    const double c = in_minority_blob ? -2.0 : 2.0;
    pts(i, 0) = c + g(rng);
    pts(i, 1) = c + g(rng);
  }
  SamplerConfig cfg;
  cfg.method = SamplerMethod::instance_hardness;
  cfg.seed = 8;
  const Vector hardness = instance_hardness_scores(pts, y, cfg);
  CHECK(hardness.size() == n_min + n_maj);
  CHECK((hardness.array() > 0).all());
  CHECK((hardness.array() < 1).all());
  double worst_clean = 1.0, best_flipped = 0.0;
  for (int i = n_min; i < n_min + n_maj; ++i) {
    if (i >= n_min + n_maj - flipped) best_flipped = std::max(best_flipped, hardness[i]);
    else worst_clean = std::min(worst_clean, hardness[i]);
  }
  CHECK(best_flipped < worst_clean);

  const auto kept = select_instance_hardness(pts, y, cfg);
  CHECK(kept.size() == 2 * n_min);
  for (int i = n_min + n_maj - flipped; i < n_min + n_maj; ++i)
    CHECK_FALSE(std::binary_search(kept.begin(), kept.end(), static_cast<std::size_t>(i)));
  CHECK(select_instance_hardness(pts, y, cfg) == kept);
}

TEST_CASE("instance hardness on a cohort") {
  const LabeledCohort c = make_cohort(10, 25, 3, 6);
  SamplerConfig cfg;
  cfg.method = SamplerMethod::instance_hardness;
  cfg.seed = 2;
  const auto out = apply_sampler(c, cfg);
  check_balanced_subset(c, out);
  CHECK(instance_hardness_threshold(c, cfg).subject_ids == out.cohort.subject_ids);

  const LabeledCohort tiny = make_cohort(3, 12, 3, 7);
  try {
    apply_sampler(tiny, cfg);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_samples_for_folds);
  }
}

TEST_CASE("sampler config validation") {
  SamplerConfig cfg;
  cfg.k_neighbors = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.iht_internal_folds = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
