#pragma once

#include <cstdint>
#include <vector>

#include "fql/gf.hpp"
#include "fql/rng.hpp"

namespace fql {

// Deterministic target depending on at most |relevant| coordinates. The value
// table covers only the relevant coordinates (q^k entries), indexed in mixed
// radix with the first (smallest) relevant coordinate most significant.
struct JuntaFunction {
  FieldSpec spec;
  std::uint32_t arity = 0;
  std::vector<std::uint32_t> relevant;  // sorted ascending, original indices
  std::vector<FieldElem> table;

  FieldElem eval(const FieldVector& x) const;
  std::uint64_t table_size() const { return table.size(); }
};

// Exact relevant set read off the table: a coordinate counts iff two
// assignments differing only there give different values.
std::vector<std::uint32_t> relevant_bruteforce(const JuntaFunction& f);

// Random k-junta whose declared coordinates are all genuinely relevant
// (table resampled until relevant_bruteforce confirms).
JuntaFunction gen_random_junta(const FieldSpec& spec, std::uint32_t n, std::uint32_t k,
                               Rng& rng);

// Row-stochastic q*q channel; row v is the law of the label given that the
// hidden linear form evaluates to v.
struct NoiseModel {
  FieldSpec spec;
  std::vector<double> rows;  // row-major, q*q

  static NoiseModel make(const FieldSpec& spec, std::vector<double> rows);
  static NoiseModel identity(const FieldSpec& spec);
  // Pass-through with probability eta, uniform output otherwise.
  static NoiseModel eta_mix(const FieldSpec& spec, double eta);
  double at(FieldElem v, FieldElem w) const { return rows[v * spec.q() + w]; }
};

// Randomized target for the noisy linear-form learning problem: the label law
// depends on x only through chi_alpha(x).
struct LdmeTarget {
  FieldSpec spec;
  std::uint32_t arity = 0;
  FieldVector alpha;
  NoiseModel noise;
  double exact_cor = 0.0;  // |E[e(f - chi_alpha)]|, computed from the channel
};

// |E[e(f(x) - chi_alpha(x))]| for a channel keyed to chi_alpha.
double channel_self_correlation(const FieldSpec& spec, const NoiseModel& noise);

// Default target: eta-mix channel with eta = rho, so the correlation is
// exactly rho. Throws InfeasibleCorrelation outside (0, 1].
LdmeTarget gen_ldme_target(const FieldSpec& spec, std::uint32_t n, FieldVector alpha,
                           double rho, Rng& rng);

LdmeTarget make_ldme_target(const FieldSpec& spec, std::uint32_t n, FieldVector alpha,
                            NoiseModel noise);

}  // namespace fql
