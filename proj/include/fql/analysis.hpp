#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fql/gf.hpp"
#include "fql/oracle.hpp"
#include "fql/rng.hpp"
#include "fql/targets.hpp"

namespace fql {

// Exact Fourier coefficient <e(f), e(chi_alpha)> = E_x[e(f(x) - chi_alpha(x))],
// computed over the subcube spanned by supp(alpha) and the relevant set.
// Exactly zero when alpha touches a coordinate outside the relevant set.
std::complex<double> fourier_exact(const JuntaFunction& f, const FieldVector& alpha);

// Sample mean of e(label) * conj(e(chi_alpha(x))).
std::complex<double> fourier_estimate(ExampleOracle& oracle, const FieldVector& alpha,
                                      std::uint64_t samples, Rng& rng);

// Law of an F_q-valued random variable.
struct DistributionTable {
  std::vector<double> probs;

  static DistributionTable make(std::vector<double> probs);
};

double statistical_distance(const DistributionTable& a, const DistributionTable& b);

// max over a in F_q of |E[e(aX)] - E[e(aX')]|; the a=0 term always vanishes.
double character_distance(const DistributionTable& a, const DistributionTable& b,
                          const FieldSpec& spec);

// Exact |E[e(f(x) - chi_gamma(x))]| for a channel target, by the case split
// on whether gamma is zero, a multiple of alpha, or independent of it.
double correlation_exact(const LdmeTarget& target, const FieldVector& gamma);

// The pair (a, A) realizing the Fourier-mass filter {alpha : A alpha = a^m}.
struct ProjectionParams {
  std::uint32_t m = 0;  // rows
  std::uint32_t n = 0;  // columns = oracle arity
  std::vector<FieldElem> a_matrix;  // row-major, m*n
  FieldElem a = 0;

  FieldElem at(std::uint32_t row, std::uint32_t col) const { return a_matrix[row * n + col]; }
  static ProjectionParams random(const FieldSpec& spec, std::uint32_t m, std::uint32_t n,
                                 FieldElem a, Rng& rng);
};

// E_z[e(a*f(x + A^T z)) * conj(e(chi_{a^m}(z)))] by enumeration of z.
std::complex<double> projection_exact(const JuntaFunction& f, const ProjectionParams& params,
                                      const FieldVector& x);

// Example transform (x, b) -> (x - A^T p, a*(b - sum p_j)) with p uniform.
// For every x', the label satisfies E[e(b')] = projection of f at x'.
class ProjectedOracle final : public ExampleOracle {
 public:
  ProjectedOracle(ExampleOracle& base, ProjectionParams params);
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override;
  std::uint32_t arity() const override { return base_.arity(); }
  const FieldSpec& spec() const override { return base_.spec(); }
  std::uint64_t draws() const override { return base_.draws(); }

 private:
  ExampleOracle& base_;
  ProjectionParams params_;
  FieldVector p_scratch_;
};

// Exact count of events over an enumerated probability space.
struct ExactProb {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  double value() const { return total ? static_cast<double>(hits) / total : 0.0; }
};

// Probability over the D-columns of a uniform A in F_q^(m x n) that
// A alpha = 1^m while A beta != 1^m for every other beta in the D-cube.
ExactProb filter_probability_exact(const FieldSpec& spec, const FieldVector& alpha_on_d,
                                   std::uint32_t m);

}  // namespace fql
