#include "fql/targets.hpp"

#include <algorithm>
#include <cmath>

#include "fql/errors.hpp"

namespace fql {
namespace {

constexpr std::uint64_t kTableBudget = 1u << 24;

std::uint64_t pow_u64(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

FieldElem JuntaFunction::eval(const FieldVector& x) const {
  if (x.size() != arity) throw ArityMismatch("junta eval");
  std::uint64_t idx = 0;
  for (auto c : relevant) idx = idx * spec.q() + x[c];
  return table[idx];
}

std::vector<std::uint32_t> relevant_bruteforce(const JuntaFunction& f) {
  const std::uint32_t q = f.spec.q();
  const std::uint32_t k = static_cast<std::uint32_t>(f.relevant.size());
  std::vector<std::uint32_t> out;
  for (std::uint32_t t = 0; t < k; ++t) {
    std::uint64_t stride = pow_u64(q, k - 1 - t);
    std::uint64_t outer_count = pow_u64(q, t);
    bool relevant = false;
    for (std::uint64_t outer = 0; outer < outer_count && !relevant; ++outer) {
      std::uint64_t block = outer * stride * q;
      for (std::uint64_t inner = 0; inner < stride && !relevant; ++inner) {
        FieldElem v0 = f.table[block + inner];
        for (std::uint32_t d = 1; d < q; ++d) {
          if (f.table[block + inner + d * stride] != v0) {
            relevant = true;
            break;
          }
        }
      }
    }
    if (relevant) out.push_back(f.relevant[t]);
  }
  return out;
}

JuntaFunction gen_random_junta(const FieldSpec& spec, std::uint32_t n, std::uint32_t k,
                               Rng& rng) {
  if (k > n) throw Error("gen_random_junta: k > n");
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    size *= spec.q();
    if (size > kTableBudget) throw BudgetExceeded("junta table");
  }
  std::vector<std::uint32_t> coords;
  while (coords.size() < k) {
    std::uint32_t c = rng.uniform_u32(n);
    if (std::find(coords.begin(), coords.end(), c) == coords.end()) coords.push_back(c);
  }
  std::sort(coords.begin(), coords.end());

  JuntaFunction f{spec, n, coords, {}};
  f.table.resize(size);
  for (;;) {
    for (auto& v : f.table) v = static_cast<FieldElem>(rng.uniform_u32(spec.q()));
    if (relevant_bruteforce(f).size() == k) return f;
  }
}

NoiseModel NoiseModel::make(const FieldSpec& spec, std::vector<double> rows) {
  const std::uint32_t q = spec.q();
  if (rows.size() != static_cast<std::size_t>(q) * q)
    throw Error("noise model: wrong channel size");
  for (std::uint32_t v = 0; v < q; ++v) {
    double sum = 0;
    for (std::uint32_t w = 0; w < q; ++w) {
      double e = rows[v * q + w];
      if (e < 0) throw Error("noise model: negative entry");
      sum += e;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("noise model: row does not sum to 1");
  }
  return NoiseModel{spec, std::move(rows)};
}

NoiseModel NoiseModel::identity(const FieldSpec& spec) {
  const std::uint32_t q = spec.q();
  std::vector<double> rows(static_cast<std::size_t>(q) * q, 0.0);
  for (std::uint32_t v = 0; v < q; ++v) rows[v * q + v] = 1.0;
  return NoiseModel{spec, std::move(rows)};
}

NoiseModel NoiseModel::eta_mix(const FieldSpec& spec, double eta) {
  const std::uint32_t q = spec.q();
  std::vector<double> rows(static_cast<std::size_t>(q) * q, (1.0 - eta) / q);
  for (std::uint32_t v = 0; v < q; ++v) rows[v * q + v] += eta;
  return make(spec, std::move(rows));
}

double channel_self_correlation(const FieldSpec& spec, const NoiseModel& noise) {
  const std::uint32_t q = spec.q();
  std::complex<double> sum = 0;
  for (std::uint32_t v = 0; v < q; ++v)
    for (std::uint32_t w = 0; w < q; ++w)
      sum += noise.at(static_cast<FieldElem>(v), static_cast<FieldElem>(w)) *
             spec.chr(spec.sub(static_cast<FieldElem>(w), static_cast<FieldElem>(v)));
  return std::abs(sum) / q;
}

LdmeTarget make_ldme_target(const FieldSpec& spec, std::uint32_t n, FieldVector alpha,
                            NoiseModel noise) {
  if (alpha.size() != n) throw ArityMismatch("ldme target alpha");
  if (weight(alpha) == 0) throw ZeroVector();
  double cor = channel_self_correlation(spec, noise);
  return LdmeTarget{spec, n, std::move(alpha), std::move(noise), cor};
}

LdmeTarget gen_ldme_target(const FieldSpec& spec, std::uint32_t n, FieldVector alpha,
                           double rho, Rng& rng) {
  (void)rng;  // reserved for randomized channel families
  if (!(rho > 0.0 && rho <= 1.0))
    throw InfeasibleCorrelation("rho must lie in (0, 1]");
  auto target = make_ldme_target(spec, n, std::move(alpha), NoiseModel::eta_mix(spec, rho));
  if (target.exact_cor < rho - 1e-9)
    throw InfeasibleCorrelation("constructed channel misses rho");
  return target;
}

}  // namespace fql
