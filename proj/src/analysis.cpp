#include "fql/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "fql/errors.hpp"

namespace fql {
namespace {

constexpr std::uint64_t kEnumBudget = 1u << 24;

std::uint64_t checked_pow(std::uint64_t base, std::uint32_t e, const char* what) {
  std::uint64_t r = 1;
  while (e--) {
    r *= base;
    if (r > kEnumBudget) throw BudgetExceeded(what);
  }
  return r;
}

}  // namespace

std::complex<double> fourier_exact(const JuntaFunction& f, const FieldVector& alpha) {
  if (alpha.size() != f.arity) throw ArityMismatch("fourier_exact");
  const FieldSpec& s = f.spec;

  std::vector<std::uint32_t> cube = f.relevant;
  for (std::uint32_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (!std::binary_search(f.relevant.begin(), f.relevant.end(), i))
      return {0.0, 0.0};  // mass on a coordinate the function never reads
  }
  std::uint64_t total = checked_pow(s.q(), static_cast<std::uint32_t>(cube.size()),
                                    "fourier_exact subcube");
  FieldVector x(f.arity, 0);
  std::complex<double> sum = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t v = t;
    for (auto c : cube) {
      x[c] = static_cast<FieldElem>(v % s.q());
      v /= s.q();
    }
    sum += s.chr(s.sub(f.eval(x), s.chi(alpha, x)));
  }
  return sum / static_cast<double>(total);
}

std::complex<double> fourier_estimate(ExampleOracle& oracle, const FieldVector& alpha,
                                      std::uint64_t samples, Rng& rng) {
  const FieldSpec& s = oracle.spec();
  FieldVector x;
  FieldElem b = 0;
  std::complex<double> sum = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    oracle.sample(rng, x, b);
    sum += s.chr(s.sub(b, s.chi(alpha, x)));
  }
  return sum / static_cast<double>(samples);
}

DistributionTable DistributionTable::make(std::vector<double> probs) {
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw Error("distribution: negative mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error("distribution: mass does not sum to 1");
  return DistributionTable{std::move(probs)};
}

double statistical_distance(const DistributionTable& a, const DistributionTable& b) {
  if (a.probs.size() != b.probs.size()) throw ArityMismatch("statistical_distance");
  double sum = 0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) sum += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * sum;
}

double character_distance(const DistributionTable& a, const DistributionTable& b,
                          const FieldSpec& spec) {
  if (a.probs.size() != spec.q() || b.probs.size() != spec.q())
    throw ArityMismatch("character_distance");
  double best = 0;
  for (std::uint32_t m = 0; m < spec.q(); ++m) {
    std::complex<double> diff = 0;
    for (std::uint32_t x = 0; x < spec.q(); ++x)
      diff += (a.probs[x] - b.probs[x]) *
              spec.chr(spec.mul(static_cast<FieldElem>(m), static_cast<FieldElem>(x)));
    best = std::max(best, std::abs(diff));
  }
  return best;
}

double correlation_exact(const LdmeTarget& target, const FieldVector& gamma) {
  if (gamma.size() != target.arity) throw ArityMismatch("correlation_exact");
  const FieldSpec& s = target.spec;
  const std::uint32_t q = s.q();

  if (weight(gamma) == 0) {
    std::complex<double> sum = 0;
    for (std::uint32_t v = 0; v < q; ++v)
      for (std::uint32_t w = 0; w < q; ++w)
        sum += target.noise.at(static_cast<FieldElem>(v), static_cast<FieldElem>(w)) *
               s.chr(static_cast<FieldElem>(w));
    return std::abs(sum) / q;
  }

  // gamma = c * alpha for some nonzero c?
  FieldElem c = 0;
  bool dependent = weight(gamma) == weight(target.alpha);
  if (dependent) {
    for (std::uint32_t i = 0; i < gamma.size() && dependent; ++i) {
      if ((gamma[i] == 0) != (target.alpha[i] == 0)) dependent = false;
      else if (gamma[i] != 0) {
        FieldElem ratio = s.mul(gamma[i], s.inv(target.alpha[i]));
        if (c == 0) c = ratio;
        else if (ratio != c) dependent = false;
      }
    }
  }
  if (!dependent) return 0.0;  // independent residual is exactly uniform

  // E[e(f - c*chi_alpha)] conditioned on chi_alpha(x) = v, uniform over v.
  std::complex<double> sum = 0;
  for (std::uint32_t v = 0; v < q; ++v) {
    FieldElem cv = s.mul(c, static_cast<FieldElem>(v));
    for (std::uint32_t w = 0; w < q; ++w)
      sum += target.noise.at(static_cast<FieldElem>(v), static_cast<FieldElem>(w)) *
             s.chr(s.sub(static_cast<FieldElem>(w), cv));
  }
  return std::abs(sum) / q;
}

ProjectionParams ProjectionParams::random(const FieldSpec& spec, std::uint32_t m,
                                          std::uint32_t n, FieldElem a, Rng& rng) {
  ProjectionParams p;
  p.m = m;
  p.n = n;
  p.a = a;
  p.a_matrix.resize(static_cast<std::size_t>(m) * n);
  for (auto& e : p.a_matrix) e = static_cast<FieldElem>(rng.uniform_u32(spec.q()));
  return p;
}

std::complex<double> projection_exact(const JuntaFunction& f, const ProjectionParams& params,
                                      const FieldVector& x) {
  if (x.size() != f.arity || params.n != f.arity) throw ArityMismatch("projection_exact");
  const FieldSpec& s = f.spec;
  const std::uint32_t q = s.q(), m = params.m;
  std::uint64_t total = checked_pow(q, m, "projection_exact z-cube");

  FieldVector z(m), shifted(f.arity);
  std::complex<double> sum = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t v = t;
    FieldElem zsum = 0;
    for (std::uint32_t j = 0; j < m; ++j) {
      z[j] = static_cast<FieldElem>(v % q);
      v /= q;
      zsum = s.add(zsum, z[j]);
    }
    for (std::uint32_t i = 0; i < f.arity; ++i) {
      FieldElem acc = x[i];
      for (std::uint32_t j = 0; j < m; ++j)
        acc = s.add(acc, s.mul(params.at(j, i), z[j]));
      shifted[i] = acc;
    }
    // chi_{a^m}(z) = a * sum z_j
    sum += s.chr(s.mul(params.a, f.eval(shifted))) * s.chr_conj(s.mul(params.a, zsum));
  }
  return sum / static_cast<double>(total);
}

ProjectedOracle::ProjectedOracle(ExampleOracle& base, ProjectionParams params)
    : base_(base), params_(std::move(params)) {
  if (params_.a == 0) throw Error("projected oracle needs a != 0");
  if (params_.n != base.arity()) throw ArityMismatch("projected oracle matrix");
}

void ProjectedOracle::sample(Rng& rng, FieldVector& x, FieldElem& label) {
  const FieldSpec& s = base_.spec();
  const std::uint32_t q = s.q(), m = params_.m;
  base_.sample(rng, x, label);
  p_scratch_.resize(m);
  FieldElem psum = 0;
  for (std::uint32_t j = 0; j < m; ++j) {
    p_scratch_[j] = static_cast<FieldElem>(rng.uniform_u32(q));
    psum = s.add(psum, p_scratch_[j]);
  }
  for (std::uint32_t i = 0; i < params_.n; ++i) {
    FieldElem acc = 0;
    for (std::uint32_t j = 0; j < m; ++j) {
      if (p_scratch_[j] == 0) continue;
      acc = s.add(acc, s.mul(params_.at(j, i), p_scratch_[j]));
    }
    x[i] = s.sub(x[i], acc);
  }
  label = s.mul(params_.a, s.sub(label, psum));
}

ExactProb filter_probability_exact(const FieldSpec& spec, const FieldVector& alpha_on_d,
                                   std::uint32_t m) {
  const std::uint32_t q = spec.q();
  const std::uint32_t d = static_cast<std::uint32_t>(alpha_on_d.size());
  if (weight(alpha_on_d) == 0) throw ZeroVector();
  std::uint64_t matrices = checked_pow(q, m * d, "filter probability A-cube");
  std::uint64_t betas = checked_pow(q, d, "filter probability beta-cube");

  std::vector<FieldElem> a(static_cast<std::size_t>(m) * d);
  FieldVector beta(d);
  ExactProb out;
  out.total = matrices;
  for (std::uint64_t t = 0; t < matrices; ++t) {
    std::uint64_t v = t;
    for (auto& e : a) {
      e = static_cast<FieldElem>(v % q);
      v /= q;
    }
    auto image_is_ones = [&](const FieldVector& vec) {
      for (std::uint32_t r = 0; r < m; ++r) {
        FieldElem acc = 0;
        for (std::uint32_t c = 0; c < d; ++c)
          acc = spec.add(acc, spec.mul(a[r * d + c], vec[c]));
        if (acc != 1) return false;
      }
      return true;
    };
    if (!image_is_ones(alpha_on_d)) continue;
    bool unique = true;
    for (std::uint64_t bt = 0; bt < betas && unique; ++bt) {
      std::uint64_t bv = bt;
      for (auto& e : beta) {
        e = static_cast<FieldElem>(bv % q);
        bv /= q;
      }
      if (beta == alpha_on_d) continue;
      if (image_is_ones(beta)) unique = false;
    }
    if (unique) ++out.hits;
  }
  return out;
}

}  // namespace fql
