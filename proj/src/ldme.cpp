#include "fql/ldme.hpp"

#include <algorithm>
#include <cmath>

#include "fql/errors.hpp"

namespace fql {
namespace {

// stream labels
constexpr std::uint64_t kPhase1Check = 0x11;
constexpr std::uint64_t kRoundBuild = 0x12;
constexpr std::uint64_t kRoundCheck = 0x13;

std::uint64_t ceil_scaled(double raw, double multiplier) {
  double v = std::ceil(raw * multiplier);
  if (!(v >= 1.0)) return 1;
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t check_cor_sample_size(std::uint32_t q, double rho, double delta,
                                    double multiplier) {
  double q4 = std::pow(static_cast<double>(q), 4.0);
  return ceil_scaled(2.0 * q4 / (rho * rho) * std::log(q / delta), multiplier);
}

std::uint64_t ldme_instance_rows(std::uint32_t q, double rho, double multiplier) {
  double q6 = std::pow(static_cast<double>(q), 6.0);
  return ceil_scaled(8.0 * q6 / (rho * rho) * std::log(4.0), multiplier);
}

std::uint64_t ldme_outer_repeats(double delta) {
  return static_cast<std::uint64_t>(std::ceil(std::log2(2.0 / delta)));
}

bool check_cor(ExampleOracle& oracle, double rho, const FieldVector& gamma, double delta,
               Rng& rng, double multiplier, CheckStats* stats) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t q = s.q();
  const std::uint64_t m = check_cor_sample_size(q, rho, delta, multiplier);
  const double cut = (1.0 / q + rho / (2.0 * q * q)) * static_cast<double>(m);
  if (stats) {
    stats->m = m;
    stats->draws += static_cast<std::uint64_t>(q) * m;
  }
  FieldVector x;
  FieldElem b = 0;
  for (std::uint32_t a = 0; a < q; ++a) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      oracle.sample(rng, x, b);
      if (s.sub(b, s.chi(gamma, x)) == a) ++count;
    }
    if (static_cast<double>(count) >= cut) return true;
  }
  return false;
}

std::vector<FieldVector> enumerate_side_columns(const FieldSpec& spec,
                                                const std::vector<std::uint32_t>& side_coords,
                                                std::uint32_t n, std::uint32_t k, FieldElem s,
                                                std::uint64_t column_budget) {
  if (s == 0) throw Error("side columns: initial value must be nonzero");
  const std::uint32_t q = spec.q();
  const std::uint32_t wmax =
      std::min<std::uint32_t>((k + 1) / 2, static_cast<std::uint32_t>(side_coords.size()));
  std::vector<FieldVector> out;
  std::vector<std::uint32_t> support;

  for (std::uint32_t w = 1; w <= wmax; ++w) {
    // support subsets of size w over side_coords, lexicographic
    support.resize(w);
    for (std::uint32_t i = 0; i < w; ++i) support[i] = i;
    for (;;) {
      // the smallest coordinate carries the fixed initial value; the rest run
      // through all nonzero values, last position fastest
      std::uint64_t combos = 1;
      for (std::uint32_t i = 1; i < w; ++i) combos *= (q - 1);
      for (std::uint64_t t = 0; t < combos; ++t) {
        FieldVector v(n, 0);
        v[side_coords[support[0]]] = s;
        std::uint64_t r = t;
        for (std::uint32_t i = w; i-- > 1;) {
          v[side_coords[support[i]]] = static_cast<FieldElem>(1 + r % (q - 1));
          r /= (q - 1);
        }
        out.push_back(std::move(v));
        if (out.size() > column_budget) throw BudgetExceeded("column budget");
      }
      // next support combination, lexicographic
      bool advanced = false;
      for (std::uint32_t i = w; i-- > 0;) {
        if (support[i] < side_coords.size() - (w - i)) {
          ++support[i];
          for (std::uint32_t j = i + 1; j < w; ++j) support[j] = support[j - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return out;
}

LbpInstance build_lbp_instance(ExampleOracle& oracle, std::uint32_t k, const SplitConfig& cfg,
                               std::uint32_t d, Rng& rng,
                               std::vector<FieldVector>* column_vectors,
                               std::uint64_t column_budget) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t q = s.q();
  const std::uint32_t n = oracle.arity();
  if (cfg.part.n != n) throw ArityMismatch("split partition");

  auto jcols = enumerate_side_columns(s, cfg.part.j_indices(), n, k, cfg.s1, column_budget);
  auto bcols = enumerate_side_columns(s, cfg.part.jbar_indices(), n, k, cfg.s2, column_budget);
  const std::size_t nj = jcols.size();
  std::vector<FieldVector> cols = std::move(jcols);
  cols.insert(cols.end(), std::make_move_iterator(bcols.begin()),
              std::make_move_iterator(bcols.end()));
  if (cols.size() > column_budget) throw BudgetExceeded("column budget");
  if (cols.size() < 2) throw Error("split produced fewer than two columns");

  LbpInstance inst;
  inst.num_cols = static_cast<std::uint32_t>(cols.size());
  inst.rows = d;
  inst.rho = 0.0;  // caller records the claimed correlation
  inst.labels.resize(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) inst.labels[c] = s.vector_token(cols[c]);
  inst.bits.assign(std::size_t(inst.num_cols) * inst.words_per_col(), 0);

  // sparse term lists; columns carry at most ceil(k/2) nonzero coefficients
  std::vector<std::pair<std::uint32_t, FieldElem>> terms;
  std::vector<std::uint32_t> term_begin(cols.size() + 1, 0);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::uint32_t i = 0; i < n; ++i)
      if (cols[c][i] != 0) terms.emplace_back(i, cols[c][i]);
    term_begin[c + 1] = static_cast<std::uint32_t>(terms.size());
  }

  const double p_heads = q / (2.0 * (q - 1));
  FieldVector x;
  FieldElem b = 0;
  for (std::uint32_t r = 0; r < d; ++r) {
    oracle.sample(rng, x, b);
    const FieldElem bshift = s.sub(b, cfg.a1);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      FieldElem chi = 0;
      for (std::uint32_t t = term_begin[c]; t < term_begin[c + 1]; ++t)
        chi = s.add(chi, s.mul(terms[t].second, x[terms[t].first]));
      FieldElem value = (c < nj) ? s.sub(bshift, chi) : chi;
      if (value == cfg.a2) continue;  // concentrated value keeps +1
      if (rng.keyed_coin(r, c, p_heads)) inst.set_minus(static_cast<std::uint32_t>(c), r);
    }
  }
  if (column_vectors) *column_vectors = std::move(cols);
  return inst;
}

LdmeResult solve_ldme(ExampleOracle& oracle, std::uint32_t k, double rho, double delta,
                      Rng& rng, const LdmeConfig& cfg) {
  const FieldSpec& s = oracle.spec();
  const std::uint32_t q = s.q();
  const std::uint32_t n = oracle.arity();
  const std::uint64_t draws_before = oracle.draws();

  LdmeResult result;
  result.rows_d = ldme_instance_rows(q, rho, cfg.data_multiplier);
  result.repeats = ldme_outer_repeats(delta);

  // weight-one prescan
  if (!cfg.skip_phase1) {
    const double delta1 = delta / (4.0 * n * (q - 1));
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t c = 1; c < q; ++c) {
        FieldVector gamma(n, 0);
        gamma[i] = static_cast<FieldElem>(c);
        Rng check_rng = rng.derive(kPhase1Check, std::uint64_t(i) * q + c);
        if (check_cor(oracle, rho, gamma, delta1, check_rng, cfg.check_multiplier)) {
          result.gamma = std::move(gamma);
          result.phase = 1;
          result.examples = oracle.draws() - draws_before;
          return result;
        }
      }
    }
  }

  // split-and-list rounds
  if (result.rows_d > (1u << 28))
    throw BudgetExceeded("instance rows; lower rho or set data_multiplier");
  const std::uint32_t d = static_cast<std::uint32_t>(result.rows_d);
  const std::uint64_t repeats = result.repeats;
  const double rho_lbp = rho / (2.0 * q * q * q);
  const double delta2 =
      delta / (4.0 * static_cast<double>(repeats) * n * q * q * (q - 1) * (q - 1));

  // The full grid is (partition, a1, a2, s1, s2) x repeats. Repeats run
  // outermost and partitions innermost so that the budget spreads across the
  // whole product before anything is retried.
  auto parts = consecutive_partitions(n);
  std::vector<FieldVector> cols;
  std::uint64_t round = 0;
  for (std::uint64_t rep = 0; rep < repeats; ++rep) {
    for (std::uint32_t a1 = 0; a1 < q; ++a1) {
      for (std::uint32_t a2 = 0; a2 < q; ++a2) {
        for (std::uint32_t s1 = 1; s1 < q; ++s1) {
          for (std::uint32_t s2 = 1; s2 < q; ++s2) {
            for (const auto& part : parts) {
              SplitConfig split{part, static_cast<FieldElem>(a1), static_cast<FieldElem>(a2),
                                static_cast<FieldElem>(s1), static_cast<FieldElem>(s2)};
              ++round;
              if (cfg.round_budget && round > cfg.round_budget) {
                result.rounds = round - 1;
                result.examples = oracle.draws() - draws_before;
                return result;
              }
              Rng build_rng = rng.derive(kRoundBuild, round);
              auto inst =
                  build_lbp_instance(oracle, k, split, d, build_rng, &cols, cfg.column_budget);
              inst.rho = rho_lbp;
              auto found = solve_lbp(inst, rho_lbp, cfg.backend);
              if (!found) continue;
              if (cfg.score_screen > 0.0) {
                double null_scale = std::sqrt(
                    2.0 * d * std::log(static_cast<double>(inst.num_cols) *
                                       std::max(1u, inst.num_cols - 1)));
                if (static_cast<double>(found->score) < cfg.score_screen * null_scale)
                  continue;
              }
              FieldVector gamma(n, 0);
              for (std::uint32_t i = 0; i < n; ++i)
                gamma[i] = s.add(cols[found->i][i], cols[found->j][i]);
              Rng check_rng = rng.derive(kRoundCheck, round);
              if (check_cor(oracle, rho, gamma, delta2, check_rng, cfg.check_multiplier)) {
                result.gamma = std::move(gamma);
                result.phase = 2;
                result.rounds = round;
                result.examples = oracle.draws() - draws_before;
                return result;
              }
            }
          }
        }
      }
    }
  }
  result.rounds = round;
  result.examples = oracle.draws() - draws_before;
  return result;
}

}  // namespace fql
