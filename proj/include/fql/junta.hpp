#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fql/ldme.hpp"
#include "fql/oracle.hpp"
#include "fql/rng.hpp"

namespace fql {

std::uint64_t check_const_sample_size(std::uint32_t q, std::uint32_t k, double delta,
                                      double multiplier = 1.0);
std::uint64_t check_rc_sample_size(std::uint32_t q, std::uint32_t p, std::uint32_t k,
                                   double delta, double multiplier = 1.0);
std::uint64_t add_rc_trial_budget(std::uint32_t q, std::uint32_t k, double delta,
                                  double multiplier = 1.0);
std::uint64_t ldme_repeat_count(double delta);

// Draws m examples and returns the common label if they all agree, otherwise
// nothing. One-sided: a constant target is never misreported.
std::optional<FieldElem> check_const(ExampleOracle& oracle, std::uint32_t k, double delta,
                                     Rng& rng, double multiplier = 1.0,
                                     CheckStats* stats = nullptr);

// True iff for some residue a the count of {Tr(label - chi_alpha(x)) = a}
// over m fresh examples reaches (1/p + 1/(2q^k))m. Accepts vectors with a
// live coefficient, rejects vectors touching an irrelevant coordinate.
bool check_rc(ExampleOracle& oracle, std::uint32_t k, const FieldVector& alpha, double delta,
              Rng& rng, double multiplier = 1.0, CheckStats* stats = nullptr);

struct LearnerConfig {
  double check_multiplier = 1.0;   // constant/relevance gate sample sizes
  double trial_multiplier = 1.0;   // detection trial budget
  std::uint32_t ldme_repeats = 0;  // 0: ceil(log2(4/delta)) solver repeats
  std::uint32_t rejection_cap = 64;
  LdmeConfig ldme;                 // inner solver knobs
};

// One detection-phase candidate and the verdict of its relevance gate.
struct AuditEntry {
  std::vector<std::uint32_t> support;  // original coordinates
  bool accepted = false;
};

struct AddRcStats {
  std::uint64_t trial_budget = 0;  // per-cell A draws allowed
  std::uint64_t ldme_runs = 0;
  std::uint64_t ldme_rounds = 0;
  std::uint64_t gate_calls = 0;
  std::uint64_t probe_skips = 0;
};

// Detection phase: projects the oracle through random filters, runs the
// noisy-linear-form solver, gates every candidate through the relevance
// check, and returns R with the accepted support added (original indices).
// Empty result: every trial exhausted without an accepted candidate.
std::optional<std::vector<std::uint32_t>> add_rc(ExampleOracle& oracle, std::uint32_t k,
                                                 double delta,
                                                 const std::vector<std::uint32_t>& R, Rng& rng,
                                                 const LearnerConfig& cfg,
                                                 std::vector<AuditEntry>* audit = nullptr,
                                                 AddRcStats* stats = nullptr);

struct LearnResult {
  bool ok = false;
  std::vector<std::uint32_t> relevant;  // sorted original coordinates
  std::uint32_t loops = 0;
  std::uint64_t examples = 0;
  std::uint64_t check_const_calls = 0;
  std::uint64_t add_rc_calls = 0;
  AddRcStats detect_stats;
  std::vector<AuditEntry> audit;
};

// Alternates a checking phase (every restriction of the found set constant?)
// with the detection phase until the found set explains the target.
// Throws SizeOverflow if more than k coordinates accumulate.
LearnResult learn_junta(ExampleOracle& oracle, std::uint32_t k, double delta, Rng& rng,
                        const LearnerConfig& cfg = {});

}  // namespace fql
