#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fql/errors.hpp"
#include "fql/junta.hpp"
#include "fql/targets.hpp"

using namespace fql;

namespace {

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

TEST_CASE("sample size and budget formulas") {
  CHECK(check_const_sample_size(3, 2, 0.05) == 34);  // ceil(9 ln 40)
  CHECK(check_const_sample_size(2, 1, 0.1) == 6);    // ceil(2 ln 20)
  CHECK(check_rc_sample_size(2, 2, 2, 0.2) == 74);   // ceil(32 ln 10)
  CHECK(add_rc_trial_budget(2, 2, 0.2) == 48);       // ceil(16 ln 20)
  CHECK(ldme_repeat_count(0.2) == 5);                // ceil(log2 20)
  CHECK(check_const_sample_size(3, 2, 0.05, 2.0) == 67);
}

TEST_CASE("constant check") {
  auto f3 = FieldSpec::make(3, 1);
  JuntaFunction c2{f3, 5, {}, {2}};
  JuntaOracle co(c2);
  Rng rng(301);

  // constants are never misreported
  for (int t = 0; t < 100; ++t) {
    Rng r = rng.derive(t);
    CheckStats stats;
    auto got = check_const(co, 2, 0.1, r, 1.0, &stats);
    REQUIRE(got.has_value());
    CHECK(*got == 2);
    CHECK(stats.m == check_const_sample_size(3, 2, 0.1));
  }

  // a visible nonconstant function: failure rate stays near the analysis
  auto f2 = FieldSpec::make(2, 1);
  auto f = linear_junta(f2, 4, {1, 0, 0, 0});
  JuntaOracle fo(f);
  std::uint32_t missed = 0;
  for (int t = 0; t < 500; ++t) {
    Rng r = rng.derive(1000 + t);
    CheckStats stats;
    if (check_const(fo, 1, 0.1, r, 1.0, &stats).has_value()) ++missed;
    CHECK(stats.m == 6);
  }
  CHECK(missed <= 50);  // exact failure probability is 2^-5 per trial
}

TEST_CASE("relevance check: completeness, soundness, exact residual law") {
  auto f3 = FieldSpec::make(3, 1);
  FieldVector alpha{0, 1, 0, 2, 0, 0};
  auto f = linear_junta(f3, 6, alpha);
  JuntaOracle oracle(f);
  Rng rng(302);

  std::uint32_t miss = 0;
  for (int t = 0; t < 200; ++t) {
    Rng r = rng.derive(t);
    if (!check_rc(oracle, 2, alpha, 0.1, r)) ++miss;
  }
  CHECK(miss <= 20);

  FieldVector touching_irrelevant = alpha;
  touching_irrelevant[0] = 1;
  std::uint32_t false_accept = 0;
  for (int t = 0; t < 200; ++t) {
    Rng r = rng.derive(5000 + t);
    CheckStats stats;
    if (check_rc(oracle, 2, touching_irrelevant, 0.1, r, 1.0, &stats)) ++false_accept;
    CHECK(stats.draws == 3 * stats.m);
  }
  CHECK(false_accept <= 20);

  // residual law when alpha touches an irrelevant coordinate: exactly uniform
  for (auto [p, ell] : {std::pair<std::uint32_t, std::uint32_t>{3, 1}, {2, 2}}) {
    auto spec = FieldSpec::make(p, ell);
    const std::uint32_t q = spec.q();
    auto g = linear_junta(spec, 2, {1, 0});
    FieldVector probe{1, 1};  // coordinate 1 is irrelevant
    std::map<std::uint32_t, std::uint32_t> law;
    FieldVector x(2);
    for (std::uint32_t t = 0; t < q * q; ++t) {
      x[0] = static_cast<FieldElem>(t % q);
      x[1] = static_cast<FieldElem>(t / q);
      law[spec.trace(spec.sub(g.eval(x), spec.chi(probe, x)))]++;
    }
    CHECK(law.size() == p);
    for (auto& [v, c] : law) CHECK(c == q * q / p);
  }
}

TEST_CASE("detection phase finds a single-coordinate target") {
  auto f2 = FieldSpec::make(2, 1);
  auto f = linear_junta(f2, 4, {1, 0, 0, 0});
  JuntaOracle oracle(f);
  Rng rng(303);
  AddRcStats stats;
  auto grown = add_rc(oracle, 1, 0.1, {}, rng, LearnerConfig{}, nullptr, &stats);
  REQUIRE(grown.has_value());
  CHECK(*grown == std::vector<std::uint32_t>{0});
  CHECK(stats.trial_budget == add_rc_trial_budget(2, 1, 0.1));
  CHECK(stats.gate_calls >= 1);
}

TEST_CASE("detection phase accepts only relevant coordinates") {
  auto f2 = FieldSpec::make(2, 1);
  Rng rng(304);
  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.2;  // keep the unit test quick
  cfg.ldme.check_multiplier = 0.1;
  cfg.ldme.score_screen = 1.3;
  for (int t = 0; t < 12; ++t) {
    Rng trial = rng.derive(t);
    auto f = gen_random_junta(f2, 6, 2, trial);
    auto truth = relevant_bruteforce(f);
    JuntaOracle oracle(f);
    std::vector<AuditEntry> audit;
    auto grown = add_rc(oracle, 2, 0.2, {}, trial, cfg, &audit);
    for (const auto& entry : audit) {
      if (!entry.accepted) continue;
      for (auto c : entry.support)
        CHECK(std::binary_search(truth.begin(), truth.end(), c));
    }
    if (grown.has_value()) {
      for (auto c : *grown) CHECK(std::binary_search(truth.begin(), truth.end(), c));
    }
  }
}

TEST_CASE("learner: constant target halts immediately") {
  auto f3 = FieldSpec::make(3, 1);
  JuntaFunction c1{f3, 7, {}, {1}};
  JuntaOracle oracle(c1);
  Rng rng(305);
  auto res = learn_junta(oracle, 2, 0.1, rng);
  CHECK(res.ok);
  CHECK(res.relevant.empty());
  CHECK(res.loops == 1);
  CHECK(res.add_rc_calls == 0);
}

TEST_CASE("learner: linear target of full weight") {
  auto f3 = FieldSpec::make(3, 1);
  FieldVector alpha{0, 1, 0, 0, 2, 0};
  auto f = linear_junta(f3, 6, alpha);
  JuntaOracle oracle(f);
  Rng rng(306);
  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.002;
  cfg.ldme.check_multiplier = 0.02;
  cfg.ldme.score_screen = 1.3;
  cfg.ldme.round_budget = 400;
  auto res = learn_junta(oracle, 2, 0.1, rng, cfg);
  REQUIRE(res.ok);
  CHECK(res.relevant == std::vector<std::uint32_t>{1, 4});
  CHECK(res.loops <= 3);
  std::uint64_t q_to_k = 9;
  CHECK(res.check_const_calls + res.add_rc_calls <= (2 + 1) * q_to_k + 2);
}

TEST_CASE("learner: random juntas, seeded") {
  auto f2 = FieldSpec::make(2, 1);
  Rng rng(307);
  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.1;
  cfg.ldme.check_multiplier = 0.1;
  cfg.ldme.score_screen = 1.3;
  cfg.ldme.round_budget = 300;
  std::uint32_t exact = 0;
  const std::uint32_t trials = 5;
  for (std::uint32_t t = 0; t < trials; ++t) {
    Rng trial = rng.derive(t);
    auto f = gen_random_junta(f2, 10, 2, trial);
    JuntaOracle oracle(f);
    auto res = learn_junta(oracle, 2, 0.1, trial, cfg);
    CHECK(res.loops <= 3);
    // soundness is unconditional even on failed runs
    auto truth = relevant_bruteforce(f);
    for (auto c : res.relevant) CHECK(std::binary_search(truth.begin(), truth.end(), c));
    if (res.ok && res.relevant == truth) ++exact;
  }
  CHECK(exact >= trials - 1);
}

TEST_CASE("learner: permutation consistency") {
  auto f2 = FieldSpec::make(2, 1);
  Rng rng(308);
  auto f = gen_random_junta(f2, 8, 2, rng);
  // permute coordinates by a fixed cycle
  std::vector<std::uint32_t> perm(8);
  for (std::uint32_t i = 0; i < 8; ++i) perm[i] = (i + 3) % 8;
  JuntaFunction g = f;
  g.relevant.clear();
  std::vector<std::uint32_t> mapped;
  for (auto c : f.relevant) mapped.push_back(perm[c]);
  std::vector<std::uint32_t> order(f.relevant.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return mapped[a] < mapped[b]; });
  g.relevant.resize(f.relevant.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) g.relevant[i] = mapped[order[i]];
  // rebuild the table in the permuted digit order
  const std::uint32_t k = static_cast<std::uint32_t>(f.relevant.size());
  g.table.assign(f.table.size(), 0);
  for (std::uint64_t t = 0; t < f.table.size(); ++t) {
    std::uint64_t digits[8] = {0};
    std::uint64_t v = t;
    for (std::uint32_t i = k; i-- > 0;) {
      digits[i] = v % 2;
      v /= 2;
    }
    std::uint64_t gidx = 0;
    for (std::uint32_t i = 0; i < k; ++i) gidx = gidx * 2 + digits[order[i]];
    g.table[gidx] = f.table[t];
  }

  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.1;
  cfg.ldme.check_multiplier = 0.1;
  cfg.ldme.score_screen = 1.3;
  cfg.ldme.round_budget = 300;
  JuntaOracle of(f), og(g);
  Rng ra(999), rb(999);
  auto rf = learn_junta(of, 2, 0.1, ra, cfg);
  auto rg = learn_junta(og, 2, 0.1, rb, cfg);
  REQUIRE(rf.ok);
  REQUIRE(rg.ok);
  std::vector<std::uint32_t> rf_mapped;
  for (auto c : rf.relevant) rf_mapped.push_back(perm[c]);
  std::sort(rf_mapped.begin(), rf_mapped.end());
  CHECK(rf_mapped == rg.relevant);
}

TEST_CASE("learner: broken promise is caught, never silently wrong") {
  // a clean 2-junta learned with k = 1 must either overflow or report failure
  auto f2 = FieldSpec::make(2, 1);
  Rng rng(309);
  FieldVector alpha{1, 1, 0, 0};
  auto f = linear_junta(f2, 4, alpha);
  JuntaOracle oracle(f);
  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.25;
  cfg.ldme.check_multiplier = 0.1;
  cfg.ldme.score_screen = 1.3;
  cfg.ldme.round_budget = 200;
  try {
    auto res = learn_junta(oracle, 1, 0.2, rng, cfg);
    CHECK(!res.ok);  // without an overflow the learner must admit defeat
  } catch (const SizeOverflow&) {
    CHECK(true);
  }
}

TEST_CASE("learner determinism") {
  auto f2 = FieldSpec::make(2, 1);
  Rng gen(310);
  auto f = gen_random_junta(f2, 8, 2, gen);
  LearnerConfig cfg;
  cfg.ldme.data_multiplier = 0.1;
  cfg.ldme.check_multiplier = 0.1;
  cfg.ldme.score_screen = 1.3;
  cfg.ldme.round_budget = 200;
  JuntaOracle o1(f), o2(f);
  Rng r1(42), r2(42);
  auto a = learn_junta(o1, 2, 0.1, r1, cfg);
  auto b = learn_junta(o2, 2, 0.1, r2, cfg);
  CHECK(a.ok == b.ok);
  CHECK(a.relevant == b.relevant);
  CHECK(a.examples == b.examples);
}
