#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "fql/analysis.hpp"
#include "fql/errors.hpp"
#include "fql/ldme.hpp"
#include "fql/targets.hpp"

using namespace fql;

namespace {

// Oracle wrapper that records every example it hands out.
class RecordingOracle final : public ExampleOracle {
 public:
  explicit RecordingOracle(ExampleOracle& base) : base_(base) {}
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override {
    base_.sample(rng, x, label);
    xs.push_back(x);
    labels.push_back(label);
  }
  std::uint32_t arity() const override { return base_.arity(); }
  const FieldSpec& spec() const override { return base_.spec(); }
  std::uint64_t draws() const override { return base_.draws(); }

  std::vector<FieldVector> xs;
  std::vector<FieldElem> labels;

 private:
  ExampleOracle& base_;
};

JuntaFunction linear_junta(const FieldSpec& spec, std::uint32_t n, const FieldVector& alpha) {
  JuntaFunction f{spec, n, {}, {}};
  for (std::uint32_t i = 0; i < n; ++i)
    if (alpha[i] != 0) f.relevant.push_back(i);
  std::uint32_t k = static_cast<std::uint32_t>(f.relevant.size());
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < k; ++i) size *= spec.q();
  f.table.resize(size);
  FieldVector x(n, 0);
  for (std::uint64_t t = 0; t < size; ++t) {
    std::uint64_t v = t;
    for (std::uint32_t i = k; i-- > 0;) {
      x[f.relevant[i]] = static_cast<FieldElem>(v % spec.q());
      v /= spec.q();
    }
    std::uint64_t idx = 0;
    for (auto c : f.relevant) idx = idx * spec.q() + x[c];
    f.table[idx] = spec.chi(alpha, x);
  }
  return f;
}

}  // namespace

TEST_CASE("sample size formulas") {
  CHECK(check_cor_sample_size(3, 0.3, 0.1) == 6123);
  CHECK(check_cor_sample_size(2, 0.5, 0.1) == 384);  // ceil(128 * ln 20)
  CHECK(ldme_instance_rows(2, 0.5) == 2840);         // ceil(2048 * ln 4)
  CHECK(ldme_instance_rows(3, 0.5) == 32340);        // ceil(23328 * ln 4)
  CHECK(ldme_outer_repeats(0.1) == 5);
  // multipliers scale inside the ceiling
  CHECK(ldme_instance_rows(2, 0.5, 0.5) == 1420);
  CHECK(check_cor_sample_size(3, 0.3, 0.1, 2.0) == 12245);
}

TEST_CASE("check_cor verdicts and draw accounting") {
  auto f3 = FieldSpec::make(3, 1);
  Rng rng(201);
  FieldVector alpha{1, 0, 2, 0, 0, 0};
  auto target = make_ldme_target(f3, 6, alpha, NoiseModel::identity(f3));
  LdmeOracle oracle(target);

  CheckStats stats;
  CHECK(check_cor(oracle, 0.5, alpha, 0.1, rng, 1.0, &stats));
  CHECK(stats.m == check_cor_sample_size(3, 0.5, 0.1));
  CHECK(stats.draws == 3 * stats.m);

  FieldVector indep{0, 1, 0, 0, 0, 0};
  std::uint32_t false_accepts = 0;
  for (int t = 0; t < 50; ++t) {
    Rng r = rng.derive(t);
    if (check_cor(oracle, 0.5, indep, 0.1, r)) ++false_accepts;
  }
  CHECK(false_accepts <= 5);

  // scalar multiple of the target under an eta-mix channel is also rejected
  auto mixed = gen_ldme_target(f3, 6, alpha, 0.5, rng);
  LdmeOracle moracle(mixed);
  FieldVector twice(6);
  for (int i = 0; i < 6; ++i) twice[i] = f3.mul(2, alpha[i]);
  std::uint32_t accepts = 0;
  for (int t = 0; t < 20; ++t) {
    Rng r = rng.derive(1000 + t);
    if (check_cor(moracle, 0.5, twice, 0.1, r)) ++accepts;
  }
  CHECK(accepts <= 2);
}

TEST_CASE("side column enumeration") {
  auto f3 = FieldSpec::make(3, 1);
  std::vector<std::uint32_t> side{1, 3, 4, 6};

  SUBCASE("count, uniqueness, init, weight") {
    for (std::uint32_t k : {2u, 3u, 4u}) {
      auto cols = enumerate_side_columns(f3, side, 8, k, 2);
      std::uint32_t wmax = (k + 1) / 2;
      std::uint64_t expect = 0, binom[5][5] = {};
      for (int i = 0; i < 5; ++i) {
        binom[i][0] = 1;
        for (int j = 1; j <= i; ++j)
          binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0);
      }
      for (std::uint32_t w = 1; w <= wmax && w <= 4; ++w) {
        std::uint64_t v = binom[4][w];
        for (std::uint32_t i = 1; i < w; ++i) v *= 2;
        expect += v;
      }
      CHECK(cols.size() == expect);
      std::set<FieldVector> uniq(cols.begin(), cols.end());
      CHECK(uniq.size() == cols.size());
      for (const auto& c : cols) {
        CHECK(init_value(c) == 2);
        CHECK(weight(c) >= 1);
        CHECK(weight(c) <= wmax);
        for (std::uint32_t i = 0; i < 8; ++i)
          if (std::find(side.begin(), side.end(), i) == side.end()) CHECK(c[i] == 0);
      }
    }
  }

  SUBCASE("no two columns on one side are scalar multiples") {
    auto cols = enumerate_side_columns(f3, side, 8, 4, 1);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        for (std::uint32_t c = 1; c < 3; ++c) {
          FieldVector scaled(8);
          for (int t = 0; t < 8; ++t) scaled[t] = f3.mul(c, cols[j][t]);
          CHECK(scaled != cols[i]);
        }
      }
    }
  }

  SUBCASE("column budget") {
    CHECK_THROWS_AS(enumerate_side_columns(f3, side, 8, 4, 1, 3), BudgetExceeded);
  }
}

TEST_CASE("instance construction") {
  auto f3 = FieldSpec::make(3, 1);
  const std::uint32_t n = 6;
  FieldVector alpha{1, 0, 2, 0, 0, 0};  // weight 2
  auto f = linear_junta(f3, n, alpha);
  JuntaOracle base(f);
  RecordingOracle oracle(base);

  Partition part{n, 0};  // J = {0,1,2}, so alpha splits 1/1... alpha_J={0,2}
  // alpha has support {0,2}, both inside J for start=0; use start=2 so J={2,3,4}
  Partition split_part{n, 2};
  CHECK(split_part.in_j(2));
  CHECK(!split_part.in_j(0));
  (void)part;

  SplitConfig cfg{split_part, 0, 1, init_value(restrict_vector(alpha, split_part, true)),
                  init_value(restrict_vector(alpha, split_part, false))};
  const std::uint32_t d = 2000;
  std::vector<FieldVector> cols;
  Rng rng(202);
  auto inst = build_lbp_instance(oracle, 2, cfg, d, rng, &cols);
  REQUIRE(inst.rows == d);
  REQUIRE(oracle.xs.size() == d);
  REQUIRE(cols.size() == inst.num_cols);

  // k=2 gives weight-1 columns: 3 on each side
  CHECK(inst.num_cols == 6);
  std::set<std::string> labels(inst.labels.begin(), inst.labels.end());
  CHECK(labels.size() == inst.num_cols);

  // locate the target pair
  FieldVector aj = restrict_vector(alpha, split_part, true);
  FieldVector ab = restrict_vector(alpha, split_part, false);
  std::uint32_t ci = UINT32_MAX, cj = UINT32_MAX;
  std::uint32_t nj = 0;
  for (std::uint32_t c = 0; c < inst.num_cols; ++c) {
    bool on_j = true;
    for (std::uint32_t i = 0; i < n; ++i)
      if (cols[c][i] != 0 && !split_part.in_j(i)) on_j = false;
    if (on_j) ++nj;
    if (cols[c] == aj) ci = c;
    if (cols[c] == ab) cj = c;
  }
  CHECK(nj == 3);
  REQUIRE(ci != UINT32_MAX);
  REQUIRE(cj != UINT32_MAX);

  // row-by-row: the construction rule, checked from the recorded examples
  std::uint32_t minus_count = 0, nontarget_cells = 0, minus_cells = 0;
  for (std::uint32_t r = 0; r < d; ++r) {
    const FieldVector& x = oracle.xs[r];
    FieldElem b = oracle.labels[r];
    for (std::uint32_t c = 0; c < inst.num_cols; ++c) {
      bool on_j = c < nj;
      FieldElem chi = f3.chi(cols[c], x);
      FieldElem value = on_j ? f3.sub(f3.sub(b, cfg.a1), chi) : chi;
      if (value == cfg.a2) {
        CHECK(inst.entry(c, r) == 1);  // concentrated value is never flipped
      } else {
        ++nontarget_cells;
        if (inst.entry(c, r) == -1) ++minus_cells;
      }
    }
    if (inst.entry(ci, r) == -1) ++minus_count;
  }
  // conditional flip rate among non-concentrated entries is q/(2(q-1)) = 3/4
  double rate = static_cast<double>(minus_cells) / nontarget_cells;
  CHECK(std::abs(rate - 0.75) < 4.0 / std::sqrt(static_cast<double>(nontarget_cells)));
  // overall each entry is -1 with probability exactly 1/2
  double overall = static_cast<double>(minus_count) / d;
  CHECK(std::abs(overall - 0.5) < 4.0 * std::sqrt(0.25 / d));

  // target pair scores rho*d-ish: noiseless target concentrates mass 1/q on
  // the event, mu = 1/q - 1/q^2, per-row correlation 4 p_h^2 mu = 1/2
  double target_score = static_cast<double>(inst.pair_score(ci, cj));
  CHECK(target_score / d > 0.35);

  // determinism: rebuilding with the same stream gives identical bits
  JuntaOracle base2(f);
  Rng rng2(202);
  auto inst2 = build_lbp_instance(base2, 2, cfg, d, rng2, nullptr);
  CHECK(inst2.bits == inst.bits);
}

TEST_CASE("non-target column pairs are conditionally uniform") {
  // exact enumeration over the whole cube for a deterministic target
  auto f3 = FieldSpec::make(3, 1);
  const std::uint32_t n = 4;
  FieldVector alpha{1, 0, 0, 2};
  auto f = linear_junta(f3, n, alpha);
  Partition part{n, 0};  // J = {0,1}, Jbar = {2,3}
  FieldElem s1 = 1, s2 = 2;
  auto jc = enumerate_side_columns(f3, part.j_indices(), n, 2, s1);
  auto bc = enumerate_side_columns(f3, part.jbar_indices(), n, 2, s2);
  std::vector<FieldVector> cols = jc;
  cols.insert(cols.end(), bc.begin(), bc.end());
  const std::size_t nj = jc.size();
  FieldVector aj = restrict_vector(alpha, part, true);
  FieldVector ab = restrict_vector(alpha, part, false);
  const FieldElem a1 = 2;

  FieldVector x(n);
  for (std::size_t c1 = 0; c1 < cols.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < cols.size(); ++c2) {
      if (cols[c1] == aj && cols[c2] == ab) continue;  // the target pair
      // joint law conditioned on chi_alpha(x) = v
      std::map<std::tuple<FieldElem, FieldElem, FieldElem>, std::uint32_t> hist;
      for (std::uint32_t t = 0; t < 81; ++t) {
        std::uint32_t v = t;
        for (auto& e : x) {
          e = static_cast<FieldElem>(v % 3);
          v /= 3;
        }
        FieldElem va = f3.chi(alpha, x);
        FieldElem b = f.eval(x);
        auto value = [&](std::size_t c) {
          FieldElem chi = f3.chi(cols[c], x);
          return c < nj ? f3.sub(f3.sub(b, a1), chi) : chi;
        };
        hist[{va, value(c1), value(c2)}]++;
      }
      for (std::uint32_t va = 0; va < 3; ++va)
        for (std::uint32_t v1 = 0; v1 < 3; ++v1)
          for (std::uint32_t v2 = 0; v2 < 3; ++v2)
            CHECK(hist[{static_cast<FieldElem>(va), static_cast<FieldElem>(v1),
                        static_cast<FieldElem>(v2)}] == 3);  // 27 * (1/9)
    }
  }
}

TEST_CASE("a good shift pair always exists") {
  // max over (a1, a2) of the exact joint mass clears 1/q^2 + rho/q^3
  Rng rng(203);
  for (std::uint32_t q : {2u, 3u, 4u}) {
    auto spec = (q == 4) ? FieldSpec::make(2, 2) : FieldSpec::make(q, 1);
    for (int t = 0; t < 20; ++t) {
      // random channel
      std::vector<double> rows(static_cast<std::size_t>(q) * q);
      for (std::uint32_t v = 0; v < q; ++v) {
        double sum = 0;
        for (std::uint32_t w = 0; w < q; ++w) {
          rows[v * q + w] = -std::log(1.0 - rng.uniform_double());
          sum += rows[v * q + w];
        }
        for (std::uint32_t w = 0; w < q; ++w) rows[v * q + w] /= sum;
      }
      auto noise = NoiseModel::make(spec, rows);
      double rho = channel_self_correlation(spec, noise);

      // exact joint mass: Pr[X = a2 and Y = a2] with X = f - chi_J - a1,
      // Y = chi_Jbar, given the two half-forms are independent and uniform
      double best = 0;
      for (std::uint32_t a1 = 0; a1 < q; ++a1) {
        double shift_mass = 0;  // Pr[f - chi_alpha = a1]
        for (std::uint32_t u = 0; u < q; ++u)
          shift_mass +=
              noise.at(static_cast<FieldElem>(u),
                       spec.add(static_cast<FieldElem>(u), static_cast<FieldElem>(a1))) /
              q;
        best = std::max(best, shift_mass / q);
      }
      CHECK(best >= 1.0 / (q * q) + rho / (q * q * q) - 1e-12);
    }
  }
}

TEST_CASE("binarization keeps the planted bias") {
  // four-cell identity: with exact marginals 1/q and joint mass 1/q^2 + mu,
  // Pr[product = 1] equals 1/2 + 2 p_h^2 mu
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
    double ph = q / (2.0 * (q - 1));
    double mumax = 1.0 / q - 1.0 / (q * static_cast<double>(q));
    for (int step = 0; step <= 4; ++step) {
      double mu = mumax * step / 4;
      double p1 = 1.0 / (q * static_cast<double>(q)) + mu;
      double p2 = 1.0 / q - p1;
      double p4 = 1.0 - 2.0 / q + p1;
      double prod_one = p1 + 2 * p2 * (1 - ph) + p4 * (ph * ph + (1 - ph) * (1 - ph));
      CHECK(prod_one == doctest::Approx(0.5 + 2 * ph * ph * mu).epsilon(1e-12));
      CHECK(prod_one >= 0.5 + 2 * ph * ph * mu - 1e-12);
    }
    // the unconditional flip probability is exactly 1/2
    CHECK((q - 1.0) / q * ph == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("solver: weight-one prescan") {
  auto f3 = FieldSpec::make(3, 1);
  Rng rng(204);
  FieldVector alpha(8, 0);
  alpha[3] = 2;
  auto target = make_ldme_target(f3, 8, alpha, NoiseModel::identity(f3));
  LdmeOracle oracle(target);
  auto res = solve_ldme(oracle, 2, 0.5, 0.1, rng);
  REQUIRE(res.gamma.has_value());
  CHECK(res.phase == 1);
  CHECK(*res.gamma == alpha);
  CHECK(res.examples > 0);
}

TEST_CASE("solver: split rounds recover a two-coordinate target") {
  auto f2 = FieldSpec::make(2, 1);
  Rng rng(205);
  FieldVector alpha(8, 0);
  alpha[1] = 1;
  alpha[6] = 1;
  auto target = make_ldme_target(f2, 8, alpha, NoiseModel::identity(f2));
  LdmeOracle oracle(target);
  auto res = solve_ldme(oracle, 2, 0.5, 0.1, rng);
  REQUIRE(res.gamma.has_value());
  CHECK(res.phase == 2);
  CHECK(*res.gamma == alpha);
  CHECK(res.rows_d == 2840);
  CHECK(res.repeats == 5);
  CHECK(res.rounds >= 1);
}

TEST_CASE("solver: noisy three-valued target, single seeded run") {
  auto f3 = FieldSpec::make(3, 1);
  Rng rng(206);
  FieldVector alpha(6, 0);
  alpha[0] = 1;
  alpha[4] = 2;
  auto target = gen_ldme_target(f3, 6, alpha, 0.5, rng);
  LdmeOracle oracle(target);
  auto res = solve_ldme(oracle, 2, 0.5, 0.1, rng);
  REQUIRE(res.gamma.has_value());
  CHECK(correlation_exact(target, *res.gamma) >= 0.5 - 1e-9);
  CHECK(*res.gamma == alpha);  // eta-mix correlates only with alpha itself
}

TEST_CASE("solver: round budget cuts off a hopeless oracle") {
  auto f2 = FieldSpec::make(2, 1);
  JuntaFunction zero{f2, 6, {}, {0}};
  JuntaOracle oracle(zero);
  Rng rng(207);
  LdmeConfig cfg;
  cfg.round_budget = 7;
  auto res = solve_ldme(oracle, 2, 0.25, 0.1, rng, cfg);
  CHECK(!res.gamma.has_value());
  CHECK(res.rounds == 7);

  // determinism
  JuntaOracle o2(zero);
  Rng rng2(207);
  auto res2 = solve_ldme(o2, 2, 0.25, 0.1, rng2, cfg);
  CHECK(res2.rounds == res.rounds);
  CHECK(res2.examples == res.examples);
}
