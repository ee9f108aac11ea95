#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fql/gf.hpp"
#include "fql/lbp.hpp"
#include "fql/oracle.hpp"
#include "fql/rng.hpp"

namespace fql {

// Sample-size formulas. Multipliers scale the expression inside the ceiling;
// at multiplier 1.0 the construction's exact counts are drawn.
std::uint64_t check_cor_sample_size(std::uint32_t q, double rho, double delta,
                                    double multiplier = 1.0);
std::uint64_t ldme_instance_rows(std::uint32_t q, double rho, double multiplier = 1.0);
std::uint64_t ldme_outer_repeats(double delta);

struct CheckStats {
  std::uint64_t m = 0;      // per-value sample size
  std::uint64_t draws = 0;  // examples consumed
};

// True iff for some a in F_q the count of {label - chi_gamma(x) = a} over m
// fresh examples reaches (1/q + rho/(2q^2))m. Counting form; no complex
// arithmetic on the hot path.
bool check_cor(ExampleOracle& oracle, double rho, const FieldVector& gamma, double delta,
               Rng& rng, double multiplier = 1.0, CheckStats* stats = nullptr);

// One split-and-list round: the cyclic partition, the shift pair and the
// fixed initial values of the two column families.
struct SplitConfig {
  Partition part;
  FieldElem a1 = 0, a2 = 0;
  FieldElem s1 = 1, s2 = 1;  // nonzero
};

// Every vector supported on `side_coords` with weight in [1, ceil(k/2)] and
// first nonzero entry (in ascending coordinate order) equal to s. Emitted in
// a fixed order: support sets lexicographic by size then indices, remaining
// values in base-q counter order.
std::vector<FieldVector> enumerate_side_columns(const FieldSpec& spec,
                                                const std::vector<std::uint32_t>& side_coords,
                                                std::uint32_t n, std::uint32_t k, FieldElem s,
                                                std::uint64_t column_budget = 1u << 22);

// d-row sign instance: J columns carry b - chi_alpha(x) - a1, the complement
// columns carry chi_beta(x); entries equal to a2 become +1, everything else
// becomes -1 with probability q/(2(q-1)) on a coin keyed by (row, column).
// column_vectors receives the coefficient vector of each instance column.
LbpInstance build_lbp_instance(ExampleOracle& oracle, std::uint32_t k, const SplitConfig& cfg,
                               std::uint32_t d, Rng& rng,
                               std::vector<FieldVector>* column_vectors = nullptr,
                               std::uint64_t column_budget = 1u << 22);

struct LdmeConfig {
  double check_multiplier = 1.0;  // correlation-check sample sizes
  double data_multiplier = 1.0;   // instance rows d
  std::uint64_t round_budget = 0;  // cap on phase-2 rounds; 0 = exhaust them all
  LbpBackend backend = LbpBackend::kNaive;
  std::uint64_t column_budget = 1u << 22;
  bool skip_phase1 = false;  // callers that vet weight-one candidates themselves
  // When nonzero, a phase-2 candidate reaches the correlation check only if
  // its score clears screen * sqrt(2 d ln(N(N-1))), the null-maximum scale.
  // Off by default; a desk-scale knob for scaled-down row counts.
  double score_screen = 0.0;
};

struct LdmeResult {
  std::optional<FieldVector> gamma;
  int phase = 0;                // 1 = weight-one prescan, 2 = split-and-list
  std::uint64_t rounds = 0;     // phase-2 rounds executed
  std::uint64_t rows_d = 0;     // instance rows per round
  std::uint64_t repeats = 0;    // per-combination repeat count
  std::uint64_t examples = 0;   // oracle draws consumed
};

// Recovers a nonzero multiple of the hidden coefficient vector from a noisy
// linear-form oracle with correlation at least rho, confidence 1 - delta.
// Weight-one targets are caught by a direct scan; heavier targets go through
// the sign-instance reduction at correlation rho/(2q^3).
LdmeResult solve_ldme(ExampleOracle& oracle, std::uint32_t k, double rho, double delta,
                      Rng& rng, const LdmeConfig& cfg = {});

}  // namespace fql
