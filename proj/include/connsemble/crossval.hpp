#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace connsemble {

/// One splitmix64 step: add the golden-ratio increment, then finalize.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for sub-task `index` of stream `stream` under `master`:
///   mix64(mix64(master + stream * 0x9E3779B97F4A7C15) + index)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

struct FoldAssignment {
  int repetition = 0;
  int fold = 0;
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Shuffles each class with `seed` and deals its members round-robin over k
/// folds; the dealing position carries over from class 0 to class 1 so fold
/// sizes stay within one of each other.
std::vector<FoldAssignment> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed,
                                             int repetition = 0);

}  // namespace connsemble
