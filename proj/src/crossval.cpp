#include "connsemble/crossval.hpp"

#include "connsemble/error.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>

namespace connsemble {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(mix64(master + stream * 0x9E3779B97F4A7C15ULL) + index);
}

std::vector<FoldAssignment> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed,
                                             int repetition) {
  if (k < 2) raise(Errc::invalid_argument, "need at least 2 folds, got " + std::to_string(k));
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) raise(Errc::non_binary_label, "label is not 0 or 1");
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (int c = 0; c < 2; ++c)
    if (static_cast<int>(members[c].size()) < k)
      raise(Errc::class_smaller_than_k, "class " + std::to_string(c) + " has " + std::to_string(members[c].size()) +
                                            " members for " + std::to_string(k) + " folds");

  std::mt19937_64 rng(seed);
  std::vector<int> fold_of(labels.size());
  std::size_t dealer = 0;
  for (auto& cls : members) {
    std::shuffle(cls.begin(), cls.end(), rng);
    for (std::size_t idx : cls) fold_of[idx] = static_cast<int>(dealer++ % static_cast<std::size_t>(k));
  }

  std::vector<FoldAssignment> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    folds[f].repetition = repetition;
    folds[f].fold = f;
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int f = 0; f < k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
  return folds;
}

}  // namespace connsemble
