#include "fql/junta.hpp"

#include <algorithm>
#include <cmath>

#include "fql/analysis.hpp"
#include "fql/errors.hpp"

namespace fql {
namespace {

// stream labels
constexpr std::uint64_t kConstCheck = 0x21;
constexpr std::uint64_t kDetectMatrix = 0x22;
constexpr std::uint64_t kDetectSolve = 0x23;
constexpr std::uint64_t kDetectGate = 0x24;
constexpr std::uint64_t kDetectPhase = 0x25;
constexpr std::uint64_t kDetectProbe = 0x26;

std::uint64_t ceil_scaled(double raw, double multiplier) {
  double v = std::ceil(raw * multiplier);
  if (!(v >= 1.0)) return 1;
  return static_cast<std::uint64_t>(v);
}

Restriction nth_restriction(const std::vector<std::uint32_t>& R, std::uint32_t q,
                            std::uint64_t index) {
  // mixed radix over the sorted coordinates, first coordinate most significant
  Restriction tau;
  for (std::size_t i = R.size(); i-- > 0;) {
    tau.set(R[i], static_cast<FieldElem>(index % q));
    index /= q;
  }
  return tau;
}

}  // namespace

std::uint64_t check_const_sample_size(std::uint32_t q, std::uint32_t k, double delta,
                                      double multiplier) {
  return ceil_scaled(std::pow(static_cast<double>(q), static_cast<double>(k)) *
                         std::log(2.0 / delta),
                     multiplier);
}

std::uint64_t check_rc_sample_size(std::uint32_t q, std::uint32_t p, std::uint32_t k,
                                   double delta, double multiplier) {
  return ceil_scaled(2.0 * std::pow(static_cast<double>(q), 2.0 * k) * std::log(p / delta),
                     multiplier);
}

std::uint64_t add_rc_trial_budget(std::uint32_t q, std::uint32_t k, double delta,
                                  double multiplier) {
  return ceil_scaled(std::pow(static_cast<double>(q), static_cast<double>(k) + 2.0) *
                         std::log(4.0 / delta),
                     multiplier);
}

std::uint64_t ldme_repeat_count(double delta) {
  return static_cast<std::uint64_t>(std::ceil(std::log2(4.0 / delta)));
}

std::optional<FieldElem> check_const(ExampleOracle& oracle, std::uint32_t k, double delta,
                                     Rng& rng, double multiplier, CheckStats* stats) {
  const std::uint64_t m = check_const_sample_size(oracle.spec().q(), k, delta, multiplier);
  if (stats) {
    stats->m = m;
    stats->draws += m;
  }
  FieldVector x;
  FieldElem b = 0, first = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    oracle.sample(rng, x, b);
    if (i == 0)
      first = b;
    else if (b != first)
      return std::nullopt;
  }
  return first;
}

bool check_rc(ExampleOracle& oracle, std::uint32_t k, const FieldVector& alpha, double delta,
              Rng& rng, double multiplier, CheckStats* stats) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t p = s.p();
  const double qk = std::pow(static_cast<double>(s.q()), static_cast<double>(k));
  const std::uint64_t m = check_rc_sample_size(s.q(), p, k, delta, multiplier);
  const double cut = (1.0 / p + 1.0 / (2.0 * qk)) * static_cast<double>(m);
  if (stats) {
    stats->m = m;
    stats->draws += static_cast<std::uint64_t>(p) * m;
  }
  FieldVector x;
  FieldElem b = 0;
  for (std::uint32_t a = 0; a < p; ++a) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      oracle.sample(rng, x, b);
      if (s.trace(s.sub(b, s.chi(alpha, x))) == a) ++count;
    }
    if (static_cast<double>(count) >= cut) return true;
  }
  return false;
}

std::optional<std::vector<std::uint32_t>> add_rc(ExampleOracle& oracle, std::uint32_t k,
                                                 double delta,
                                                 const std::vector<std::uint32_t>& R, Rng& rng,
                                                 const LearnerConfig& cfg,
                                                 std::vector<AuditEntry>* audit,
                                                 AddRcStats* stats) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t q = s.q(), p = s.p();
  const std::uint32_t n = oracle.arity();
  const std::uint32_t n_free = n - static_cast<std::uint32_t>(R.size());

  std::uint64_t restrictions = 1;
  for (std::size_t i = 0; i < R.size(); ++i) restrictions *= q;
  const std::uint32_t scalar_count = q / p;  // p^(ell-1) distinct nonzero scalars
  const std::uint64_t trials = add_rc_trial_budget(q, k, delta, cfg.trial_multiplier);
  const std::uint64_t repeats = cfg.ldme_repeats ? cfg.ldme_repeats : ldme_repeat_count(delta);
  const double gate_delta =
      delta / (2.0 * static_cast<double>(trials) *
               std::pow(static_cast<double>(q), static_cast<double>(k) + 3.0));
  if (stats) stats->trial_budget = trials;

  const double inner_rho = 1.0 / std::pow(static_cast<double>(q), static_cast<double>(k) + 1.0);
  LdmeConfig inner = cfg.ldme;
  inner.skip_phase1 = true;  // weight-one candidates are swept directly below

  const std::uint64_t cells = restrictions * scalar_count;

  // Gate one candidate: accepted iff some nonzero multiple passes the
  // relevance check against the cell oracle. Returns the grown set on accept.
  auto gate_candidate = [&](ExampleOracle& cell_oracle, const RestrictedOracle& restricted,
                            const FieldVector& alpha, std::uint64_t gate_label)
      -> std::optional<std::vector<std::uint32_t>> {
    bool accepted = false;
    for (std::uint32_t aprime = 1; aprime < q && !accepted; ++aprime) {
      FieldVector scaled(alpha.size());
      for (std::size_t i = 0; i < alpha.size(); ++i)
        scaled[i] = s.mul(static_cast<FieldElem>(aprime), alpha[i]);
      Rng gate_rng = rng.derive(kDetectGate, gate_label, aprime);
      if (stats) ++stats->gate_calls;
      accepted =
          check_rc(cell_oracle, k, scaled, gate_delta, gate_rng, cfg.check_multiplier);
    }
    std::vector<std::uint32_t> support;
    for (std::uint32_t i = 0; i < n_free; ++i)
      if (alpha[i] != 0) support.push_back(restricted.original_index(i));
    if (audit) audit->push_back(AuditEntry{support, accepted});
    if (!accepted) return std::nullopt;
    std::vector<std::uint32_t> out = R;
    out.insert(out.end(), support.begin(), support.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  // Cells are (restriction, scalar) pairs. The trial grid is flattened with
  // repeats outermost and cells innermost so a cell whose restricted function
  // is constant cannot starve the others; per-cell budgets are unchanged.
  for (std::uint64_t rep = 0; rep < repeats; ++rep) {
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      for (std::uint32_t a = 1; a < q; ++a) {
        for (std::uint64_t cell = 0; cell < cells; ++cell) {
          const std::uint64_t tau_index = cell / scalar_count;
          const std::uint32_t j = static_cast<std::uint32_t>(cell % scalar_count);
          const FieldElem c_j = static_cast<FieldElem>(j + 1);

          Restriction tau = nth_restriction(R, q, tau_index);
          RestrictedOracle restricted(oracle, tau, cfg.rejection_cap);
          ScaledOracle cell_oracle(restricted, c_j);

          // A restriction that already explains the target has nothing to
          // detect; a handful of samples settles that far cheaper than an
          // exhausted solver run. Fresh randomness per visit, so no live cell
          // can be starved by an unlucky probe.
          {
            Rng probe_rng = rng.derive(kDetectProbe, cell, trial * repeats + rep);
            if (check_const(cell_oracle, k, 0.02, probe_rng, cfg.check_multiplier)) {
              if (stats) ++stats->probe_skips;
              continue;
            }
          }

          // Weight-one candidates need no split instance: feed them straight
          // through the relevance gate, once per cell.
          if (rep == 0 && trial == 0 && a == 1) {
            for (std::uint32_t i = 0; i < n_free; ++i) {
              FieldVector e_i(n_free, 0);
              e_i[i] = 1;
              auto grown = gate_candidate(cell_oracle, restricted, e_i,
                                          (1ull << 32) + cell * n_free + i);
              if (grown) return grown;
            }
          }

          // one filter matrix per (cell, trial), shared across repeats
          Rng a_rng = rng.derive(kDetectMatrix, cell, trial);
          auto params = ProjectionParams::random(s, k + 1, n_free, 0, a_rng);
          params.a = static_cast<FieldElem>(a);
          ProjectedOracle projected(cell_oracle, params);
          Rng solve_rng = rng.derive(kDetectSolve, (cell * trials + trial) * q + a, rep);
          LdmeResult found = solve_ldme(projected, k, inner_rho, 0.5, solve_rng, inner);
          if (stats) {
            ++stats->ldme_runs;
            stats->ldme_rounds += found.rounds;
          }
          if (!found.gamma) continue;
          auto grown = gate_candidate(cell_oracle, restricted, *found.gamma,
                                      (cell * trials + trial) * q + a);
          if (grown) return grown;
        }
      }
    }
  }
  return std::nullopt;
}

LearnResult learn_junta(ExampleOracle& oracle, std::uint32_t k, double delta, Rng& rng,
                        const LearnerConfig& cfg) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t q = s.q();
  const double calls =
      (k + 1) * std::pow(static_cast<double>(q), static_cast<double>(k)) + k;
  const double call_delta = delta / calls;

  LearnResult result;
  const std::uint64_t draws_before = oracle.draws();
  std::vector<std::uint32_t> R;

  for (std::uint32_t loop = 0;; ++loop) {
    result.loops = loop + 1;
    if (R.size() > k) throw SizeOverflow("learner exceeded the promised junta size");

    std::uint64_t restrictions = 1;
    for (std::size_t i = 0; i < R.size(); ++i) restrictions *= q;
    bool all_constant = true;
    for (std::uint64_t t = 0; t < restrictions && all_constant; ++t) {
      Restriction tau = nth_restriction(R, q, t);
      RestrictedOracle restricted(oracle, tau, cfg.rejection_cap);
      Rng check_rng = rng.derive(kConstCheck, loop, t);
      ++result.check_const_calls;
      if (!check_const(restricted, k, call_delta, check_rng, cfg.check_multiplier))
        all_constant = false;
    }
    if (all_constant) {
      result.ok = true;
      result.relevant = R;
      result.examples = oracle.draws() - draws_before;
      return result;
    }

    ++result.add_rc_calls;
    Rng detect_rng = rng.derive(kDetectPhase, loop);
    auto grown = add_rc(oracle, k, call_delta, R, detect_rng, cfg, &result.audit,
                        &result.detect_stats);
    if (!grown) {
      result.ok = false;
      result.relevant = R;
      result.examples = oracle.draws() - draws_before;
      return result;
    }
    R = std::move(*grown);
  }
}

}  // namespace fql
