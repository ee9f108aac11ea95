#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fql/rng.hpp"

namespace fql {

// N sign vectors of length d, one planted correlated pair among otherwise
// independent uniform columns. Columns are stored bit-packed, column-major;
// a set bit encodes -1. Labels are opaque unique tokens used for tie-breaks.
struct LbpInstance {
  std::uint32_t num_cols = 0;
  std::uint32_t rows = 0;
  double rho = 0.0;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> bits;

  std::uint32_t words_per_col() const { return (rows + 63) / 64; }
  const std::uint64_t* col(std::uint32_t i) const { return bits.data() + std::size_t(i) * words_per_col(); }
  std::uint64_t* col(std::uint32_t i) { return bits.data() + std::size_t(i) * words_per_col(); }
  void set_minus(std::uint32_t i, std::uint32_t row) { col(i)[row >> 6] |= 1ull << (row & 63); }
  int entry(std::uint32_t i, std::uint32_t row) const {
    return (col(i)[row >> 6] >> (row & 63)) & 1 ? -1 : 1;
  }
  // Exact inner product of two columns.
  std::int64_t pair_score(std::uint32_t i, std::uint32_t j) const;
};

struct LbpResult {
  std::uint32_t i = 0, j = 0;  // column indices, i < j
  std::string label_i, label_j;
  std::int64_t score = 0;
};

struct PlantedPair {
  std::uint32_t i = 0, j = 0;
};

// N-2 uniform columns plus a pair agreeing per row with probability
// (1+rho)/2, so the expected inner product is rho*d.
std::pair<LbpInstance, PlantedPair> gen_planted(std::uint32_t n_cols, std::uint32_t d,
                                                double rho, Rng& rng);

// Exact argmax over all column pairs; ties broken toward the
// lexicographically smallest label pair. Empty when the best inner product
// falls below threshold_rho*d/2 (a failed round, not a defect).
std::optional<LbpResult> solve_naive(const LbpInstance& inst, double threshold_rho);

// Groups columns, scores group sums against each other with one integer
// matrix product, then exactly re-scores the columns inside the best group
// pairs. Same threshold and tie contract as the naive solver.
// group_size 0 picks ceil(N^(1/3)).
std::optional<LbpResult> solve_grouped(const LbpInstance& inst, double threshold_rho,
                                       std::uint32_t group_size = 0);

enum class LbpBackend { kNaive, kGrouped };

std::optional<LbpResult> solve_lbp(const LbpInstance& inst, double threshold_rho,
                                   LbpBackend backend);

}  // namespace fql
