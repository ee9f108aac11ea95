#include "fql/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fql/analysis.hpp"
#include "fql/errors.hpp"
#include "fql/io.hpp"
#include "fql/junta.hpp"
#include "fql/lbp.hpp"
#include "fql/ldme.hpp"
#include "fql/oracle.hpp"
#include "fql/targets.hpp"
#include "fql/verify.hpp"

namespace fql {
namespace {

// Buffered line report: echoed config first, then one record per event.
// Regenerating with the same config and seed reproduces the bytes exactly.
class Report {
 public:
  Report(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}

  void line(const std::string& s) {
    out_ << s << '\n';
    buffer_ += s;
    buffer_ += '\n';
  }

  ~Report() {
    if (!path_.empty()) {
      try {
        save_file(path_, buffer_);
      } catch (...) {
      }
    }
  }

 private:
  std::ostream& out_;
  std::string path_;
  std::string buffer_;
};

FieldSpec parse_field(const std::string& token) {
  // "p:ell" uses the built-in modulus; "p:ell:c0,c1,..." is explicit
  auto colons = std::count(token.begin(), token.end(), ':');
  if (colons == 1) {
    auto pos = token.find(':');
    return FieldSpec::make(static_cast<std::uint32_t>(std::stoul(token.substr(0, pos))),
                           static_cast<std::uint32_t>(std::stoul(token.substr(pos + 1))));
  }
  return FieldSpec::from_token(token);
}

std::string coords_1based(const std::vector<std::uint32_t>& coords) {
  if (coords.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(coords[i] + 1);
  }
  return s;
}

LbpBackend parse_backend(const std::string& name) {
  if (name == "naive") return LbpBackend::kNaive;
  if (name == "grouped") return LbpBackend::kGrouped;
  throw Error("unknown backend: " + name);
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

FieldVector random_alpha(const FieldSpec& spec, std::uint32_t n, std::uint32_t w, Rng& rng) {
  FieldVector alpha(n, 0);
  std::uint32_t placed = 0;
  while (placed < w) {
    std::uint32_t i = rng.uniform_u32(n);
    if (alpha[i] == 0) {
      alpha[i] = static_cast<FieldElem>(1 + rng.uniform_u32(spec.q() - 1));
      ++placed;
    }
  }
  return alpha;
}

struct LdmeKnobs {
  double check_mult = 1.0;
  double data_mult = 1.0;
  std::uint64_t rounds = 0;
  double screen = 0.0;
};

void add_ldme_knobs(CLI::App* cmd, LdmeKnobs& k) {
  cmd->add_option("--ldme-check-mult", k.check_mult,
                  "scale the solver's correlation-check sample sizes");
  cmd->add_option("--ldme-data-mult", k.data_mult, "scale the solver's instance rows");
  cmd->add_option("--ldme-rounds", k.rounds, "cap on split rounds per solver call (0 = all)");
  cmd->add_option("--ldme-screen", k.screen,
                  "score screen in null-maximum units (0 = off)");
}

int cmd_gen(const std::string& kind, const std::string& qtok, std::uint32_t n, std::uint32_t k,
            std::uint32_t bign, std::uint32_t d, double rho, std::uint32_t alpha_weight,
            std::uint64_t seed, const std::string& out_path, Report& report) {
  Rng rng(seed);
  std::ostringstream body;
  if (kind == "junta") {
    auto spec = parse_field(qtok);
    Rng gen_rng = rng.derive(1);
    auto f = gen_random_junta(spec, n, k, gen_rng);
    write_junta(body, f);
    report.line("gen kind=junta q=" + spec.to_token() + " n=" + std::to_string(n) +
                " k=" + std::to_string(k) + " seed=" + std::to_string(seed) +
                " relevant=" + coords_1based(f.relevant));
  } else if (kind == "ldme") {
    auto spec = parse_field(qtok);
    Rng gen_rng = rng.derive(2);
    std::uint32_t w = alpha_weight ? alpha_weight : k;
    auto alpha = random_alpha(spec, n, w, gen_rng);
    auto target = gen_ldme_target(spec, n, alpha, rho, gen_rng);
    write_ldme(body, target);
    report.line("gen kind=ldme q=" + spec.to_token() + " n=" + std::to_string(n) +
                " rho=" + std::to_string(rho) + " seed=" + std::to_string(seed) +
                " alpha=" + spec.vector_token(alpha));
  } else if (kind == "lbp") {
    Rng gen_rng = rng.derive(3);
    auto [inst, pair] = gen_planted(bign, d, rho, gen_rng);
    write_lbp(body, inst);
    report.line("gen kind=lbp N=" + std::to_string(bign) + " d=" + std::to_string(d) +
                " rho=" + std::to_string(rho) + " seed=" + std::to_string(seed) +
                " planted=" + inst.labels[pair.i] + "," + inst.labels[pair.j]);
  } else {
    throw Error("unknown kind: " + kind);
  }
  save_file(out_path, body.str());
  report.line("wrote path=" + out_path);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"finite-field junta learning toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file");

  // shared option storage
  std::string qtok = "3:1";
  std::uint32_t n = 16, k = 2, bigN = 500, d = 0;
  double rho = 0.5, delta = 0.1, threshold_rho = -1.0;
  std::uint32_t trials = 1, alpha_weight = 0, repeats = 3;
  std::uint64_t seed = 12345;
  std::string out_path, instance_path, kind, backend = "naive", suite;
  bool random_instance = false, run_all = false, both_backends = false;
  double check_mult = 1.0, trial_mult = 1.0;
  std::uint32_t ldme_repeats = 0, rejection_cap = 64, group_size = 0;
  LdmeKnobs knobs;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "root seed; all streams derive from it")
        ->envname("FQL_SEED");
    cmd->add_option("--out", out_path, "also write the report to this file");
  };

  CLI::App* gen = app.add_subcommand("gen", "write an instance file");
  gen->add_option("--kind", kind, "junta | ldme | lbp")->required();
  gen->add_option("--q", qtok, "field token p:ell or p:ell:c0,c1,...");
  gen->add_option("--n", n, "arity");
  gen->add_option("--k", k, "junta size / target weight");
  gen->add_option("--N", bigN, "column count (lbp)");
  gen->add_option("--d", d, "row count (lbp)");
  gen->add_option("--rho", rho, "correlation");
  gen->add_option("--alpha-weight", alpha_weight, "target weight (ldme; default k)");
  gen->add_option("--file", instance_path, "output instance path")->required();
  add_seed(gen);

  CLI::App* learn = app.add_subcommand("learn", "run the junta learner");
  learn->add_option("--instance", instance_path, "junta instance file");
  learn->add_flag("--random", random_instance, "fresh random instance per trial");
  learn->add_option("--q", qtok, "field token (with --random)");
  learn->add_option("--n", n, "arity (with --random)");
  learn->add_option("--k", k, "junta size");
  learn->add_option("--delta", delta, "confidence");
  learn->add_option("--trials", trials, "seeded trials");
  learn->add_option("--backend", backend, "naive | grouped");
  learn->add_option("--check-mult", check_mult, "scale gate sample sizes");
  learn->add_option("--trial-mult", trial_mult, "scale the detection trial budget");
  learn->add_option("--ldme-repeats", ldme_repeats, "override solver repeats (0 = formula)");
  learn->add_option("--rejection-cap", rejection_cap, "restricted-oracle cap multiplier");
  add_ldme_knobs(learn, knobs);
  add_seed(learn);

  CLI::App* ldme = app.add_subcommand("ldme", "run the noisy linear-form solver");
  ldme->add_option("--instance", instance_path, "ldme instance file");
  ldme->add_flag("--random", random_instance, "fresh random target per trial");
  ldme->add_option("--q", qtok, "field token (with --random)");
  ldme->add_option("--n", n, "arity (with --random)");
  ldme->add_option("--k", k, "weight bound");
  ldme->add_option("--rho", rho, "correlation promise");
  ldme->add_option("--alpha-weight", alpha_weight, "planted weight (default k)");
  ldme->add_option("--delta", delta, "confidence");
  ldme->add_option("--trials", trials, "seeded trials");
  ldme->add_option("--backend", backend, "naive | grouped");
  add_ldme_knobs(ldme, knobs);
  add_seed(ldme);

  CLI::App* lbp = app.add_subcommand("lbp", "solve planted sign instances");
  lbp->add_option("--instance", instance_path, "lbp instance file");
  lbp->add_flag("--random", random_instance, "fresh planted instance per trial");
  lbp->add_option("--N", bigN, "column count");
  lbp->add_option("--d", d, "row count");
  lbp->add_option("--rho", rho, "planted correlation");
  lbp->add_option("--threshold-rho", threshold_rho, "verdict threshold (default rho)");
  lbp->add_option("--backend", backend, "naive | grouped");
  lbp->add_flag("--both", both_backends, "run both backends and compare");
  lbp->add_option("--group-size", group_size, "grouped backend group size (0 = auto)");
  lbp->add_option("--trials", trials, "seeded trials");
  add_seed(lbp);

  CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", suite, "one suite name");
  verify->add_flag("--all", run_all, "run every suite");
  add_seed(verify);

  CLI::App* bench = app.add_subcommand("bench", "time the solver backends");
  bench->add_option("--N", bigN, "column count");
  bench->add_option("--d", d, "row count");
  bench->add_option("--rho", rho, "planted correlation");
  bench->add_option("--repeats", repeats, "timing repeats (best of)");
  bench->add_option("--group-size", group_size, "grouped backend group size (0 = auto)");
  add_seed(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream dummy;
    return app.exit(e, out, dummy);
  }

  Report report(out, out_path);
  try {
    if (gen->parsed()) {
      report.line("cmd=gen seed=" + std::to_string(seed));
      return cmd_gen(kind, qtok, n, k, bigN, d ? d : 1024, rho, alpha_weight, seed,
                     instance_path, report);
    }

    if (learn->parsed()) {
      LearnerConfig cfg;
      cfg.check_multiplier = check_mult;
      cfg.trial_multiplier = trial_mult;
      cfg.ldme_repeats = ldme_repeats;
      cfg.rejection_cap = rejection_cap;
      cfg.ldme.check_multiplier = knobs.check_mult;
      cfg.ldme.data_multiplier = knobs.data_mult;
      cfg.ldme.round_budget = knobs.rounds;
      cfg.ldme.score_screen = knobs.screen;
      cfg.ldme.backend = parse_backend(backend);

      std::optional<JuntaFunction> from_file;
      if (!random_instance) {
        if (instance_path.empty()) throw Error("learn needs --instance or --random");
        std::istringstream is(load_file(instance_path));
        from_file = read_junta(is);
        k = static_cast<std::uint32_t>(from_file->relevant.size());
      }
      std::ostringstream cfg_line;
      cfg_line << "cmd=learn q=" << (random_instance ? parse_field(qtok).to_token()
                                                     : from_file->spec.to_token())
               << " n=" << (random_instance ? n : from_file->arity) << " k=" << k
               << " delta=" << delta << " trials=" << trials << " seed=" << seed
               << " backend=" << backend << " check_mult=" << check_mult
               << " trial_mult=" << trial_mult << " ldme_check_mult=" << knobs.check_mult
               << " ldme_data_mult=" << knobs.data_mult << " ldme_rounds=" << knobs.rounds
               << " ldme_screen=" << knobs.screen;
      report.line(cfg_line.str());

      Rng root(seed);
      std::uint32_t exact = 0, wrong = 0, failed = 0;
      for (std::uint32_t t = 0; t < trials; ++t) {
        auto start = std::chrono::steady_clock::now();
        Rng trial_rng = root.derive(100, t);
        std::optional<JuntaFunction> fresh;
        if (random_instance) {
          auto spec = parse_field(qtok);
          Rng gen_rng = root.derive(200, t);
          fresh = gen_random_junta(spec, n, k, gen_rng);
        }
        const JuntaFunction& f = random_instance ? *fresh : *from_file;
        JuntaOracle oracle(f);
        std::string verdict = "error";
        LearnResult res;
        try {
          res = learn_junta(oracle, k, delta, trial_rng, cfg);
          auto truth = relevant_bruteforce(f);
          if (res.ok && res.relevant == truth) {
            verdict = "exact";
            ++exact;
          } else {
            verdict = "wrong";
            ++wrong;
          }
        } catch (const Error&) {
          ++failed;
        }
        std::ostringstream line;
        line << "trial=" << t << " verdict=" << verdict << " R=" << coords_1based(res.relevant)
             << " loops=" << res.loops << " examples=" << res.examples
             << " ms=" << static_cast<std::uint64_t>(ms_since(start));
        report.line(line.str());
      }
      std::ostringstream agg;
      agg << "trials=" << trials << " exact=" << exact << " wrong=" << wrong
          << " error=" << failed << " rate=" << static_cast<double>(exact) / trials;
      report.line(agg.str());
      return 0;
    }

    if (ldme->parsed()) {
      LdmeConfig cfg;
      cfg.check_multiplier = knobs.check_mult;
      cfg.data_multiplier = knobs.data_mult;
      cfg.round_budget = knobs.rounds;
      cfg.score_screen = knobs.screen;
      cfg.backend = parse_backend(backend);

      std::optional<LdmeTarget> from_file;
      if (!random_instance) {
        if (instance_path.empty()) throw Error("ldme needs --instance or --random");
        std::istringstream is(load_file(instance_path));
        from_file = read_ldme(is);
      }
      std::ostringstream cfg_line;
      cfg_line << "cmd=ldme q="
               << (random_instance ? parse_field(qtok).to_token() : from_file->spec.to_token())
               << " n=" << (random_instance ? n : from_file->arity) << " k=" << k
               << " rho=" << rho << " delta=" << delta << " trials=" << trials
               << " seed=" << seed << " backend=" << backend
               << " check_mult=" << knobs.check_mult << " data_mult=" << knobs.data_mult
               << " rounds=" << knobs.rounds << " screen=" << knobs.screen;
      report.line(cfg_line.str());

      Rng root(seed);
      std::uint32_t hits = 0;
      for (std::uint32_t t = 0; t < trials; ++t) {
        auto start = std::chrono::steady_clock::now();
        std::optional<LdmeTarget> fresh;
        if (random_instance) {
          auto spec = parse_field(qtok);
          Rng gen_rng = root.derive(300, t);
          std::uint32_t w = alpha_weight ? alpha_weight : k;
          fresh = gen_ldme_target(spec, n, random_alpha(spec, n, w, gen_rng), rho, gen_rng);
        }
        const LdmeTarget& target = random_instance ? *fresh : *from_file;
        LdmeOracle oracle(target);
        Rng trial_rng = root.derive(400, t);
        auto res = solve_ldme(oracle, k, rho, delta, trial_rng, cfg);
        std::string verdict = "none";
        if (res.gamma) {
          double cor = correlation_exact(target, *res.gamma);
          if (*res.gamma == target.alpha)
            verdict = "exact";
          else if (cor >= rho - 1e-9)
            verdict = "multiple";
          else
            verdict = "wrong";
          if (verdict != "wrong") ++hits;
        }
        std::ostringstream line;
        line << "trial=" << t << " gamma="
             << (res.gamma ? target.spec.vector_token(*res.gamma) : std::string("-"))
             << " rounds=" << res.rounds << " examples=" << res.examples
             << " phase=" << res.phase << " verdict=" << verdict
             << " ms=" << static_cast<std::uint64_t>(ms_since(start));
        report.line(line.str());
      }
      report.line("trials=" + std::to_string(trials) + " recovered=" + std::to_string(hits) +
                  " rate=" + std::to_string(static_cast<double>(hits) / trials));
      return 0;
    }

    if (lbp->parsed()) {
      double thr = threshold_rho >= 0 ? threshold_rho : rho;
      std::ostringstream cfg_line;
      cfg_line << "cmd=lbp N=" << bigN << " d=" << d << " rho=" << rho
               << " threshold_rho=" << thr << " trials=" << trials << " seed=" << seed
               << " backend=" << (both_backends ? std::string("both") : backend);
      report.line(cfg_line.str());

      Rng root(seed);
      std::uint32_t naive_hits = 0, agreement = 0;
      for (std::uint32_t t = 0; t < trials; ++t) {
        auto start = std::chrono::steady_clock::now();
        LbpInstance inst;
        PlantedPair planted{0, 0};
        bool have_planted = random_instance;
        if (random_instance) {
          Rng gen_rng = root.derive(500, t);
          auto gen = gen_planted(bigN, d ? d : 1024, rho, gen_rng);
          inst = std::move(gen.first);
          planted = gen.second;
        } else {
          if (instance_path.empty()) throw Error("lbp needs --instance or --random");
          std::istringstream is(load_file(instance_path));
          inst = read_lbp(is);
        }
        auto emit = [&](const char* name, const std::optional<LbpResult>& r) {
          std::ostringstream line;
          line << "trial=" << t << " backend=" << name;
          if (r) {
            line << " found=1 pair=" << r->label_i << "," << r->label_j
                 << " score=" << r->score;
            if (have_planted)
              line << " planted="
                   << ((r->i == planted.i && r->j == planted.j) ? 1 : 0);
          } else {
            line << " found=0";
          }
          line << " ms=" << static_cast<std::uint64_t>(ms_since(start));
          report.line(line.str());
        };
        if (both_backends) {
          auto rn = solve_naive(inst, thr);
          auto rg = solve_grouped(inst, thr, group_size);
          emit("naive", rn);
          emit("grouped", rg);
          if (rn && have_planted && rn->i == planted.i && rn->j == planted.j) ++naive_hits;
          if (rn && rg && rn->i == rg->i && rn->j == rg->j) ++agreement;
        } else {
          auto r = parse_backend(backend) == LbpBackend::kNaive
                       ? solve_naive(inst, thr)
                       : solve_grouped(inst, thr, group_size);
          emit(backend.c_str(), r);
          if (r && have_planted && r->i == planted.i && r->j == planted.j) ++naive_hits;
        }
      }
      std::ostringstream agg;
      agg << "trials=" << trials;
      if (random_instance) agg << " planted_found=" << naive_hits;
      if (both_backends) agg << " agreement=" << agreement;
      report.line(agg.str());
      return 0;
    }

    if (verify->parsed()) {
      report.line("cmd=verify seed=" + std::to_string(seed) +
                  " suite=" + (run_all || suite.empty() ? std::string("all") : suite));
      std::vector<SuiteResult> results;
      if (run_all || suite.empty()) {
        results = run_all_verify_suites(seed);
      } else {
        results.push_back(run_verify_suite(suite, seed));
      }
      bool all_pass = true;
      for (const auto& r : results) {
        std::ostringstream line;
        line << "suite=" << r.name << " pass=" << (r.pass ? 1 : 0) << " cases=" << r.cases
             << (r.margin_is_deviation ? " max_deviation=" : " worst_margin=") << r.margin
             << " secs=" << r.seconds;
        report.line(line.str());
        all_pass &= r.pass;
      }
      report.line(std::string("verify pass=") + (all_pass ? "1" : "0"));
      return all_pass ? 0 : 1;
    }

    if (bench->parsed()) {
      if (d == 0) d = 2048;
      report.line("cmd=bench N=" + std::to_string(bigN) + " d=" + std::to_string(d) +
                  " rho=" + std::to_string(rho) + " repeats=" + std::to_string(repeats) +
                  " seed=" + std::to_string(seed));
      Rng root(seed);
      auto gen = gen_planted(bigN, d, rho, root);
      double best_naive = 1e18, best_grouped = 1e18;
      for (std::uint32_t r = 0; r < repeats; ++r) {
        auto s1 = std::chrono::steady_clock::now();
        auto rn = solve_naive(gen.first, 0.0);
        best_naive = std::min(best_naive, ms_since(s1));
        auto s2 = std::chrono::steady_clock::now();
        auto rg = solve_grouped(gen.first, 0.0, group_size);
        best_grouped = std::min(best_grouped, ms_since(s2));
        if (rn && rg && rn->score < rg->score) throw Error("backend disagreement");
      }
      std::ostringstream line;
      line << "naive_ms=" << best_naive << " grouped_ms=" << best_grouped
           << " factor=" << best_naive / best_grouped;
      report.line(line.str());
      return 0;
    }
  } catch (const std::exception& e) {
    report.line(std::string("error: ") + e.what());
    return 2;
  }
  return 0;
}

}  // namespace fql
