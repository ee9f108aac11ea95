#include "fql/oracle.hpp"

#include <algorithm>

#include "fql/errors.hpp"

namespace fql {

void Restriction::set(std::uint32_t coord, FieldElem value) {
  auto it = std::lower_bound(assignments.begin(), assignments.end(), coord,
                             [](const auto& a, std::uint32_t c) { return a.first < c; });
  if (it != assignments.end() && it->first == coord)
    it->second = value;
  else
    assignments.insert(it, {coord, value});
}

void JuntaOracle::sample(Rng& rng, FieldVector& x, FieldElem& label) {
  const std::uint32_t q = f_.spec.q();
  x.resize(f_.arity);
  for (auto& e : x) e = static_cast<FieldElem>(rng.uniform_u32(q));
  label = f_.eval(x);
  ++draws_;
}

LdmeOracle::LdmeOracle(const LdmeTarget& t) : t_(t) {
  const std::uint32_t q = t.spec.q();
  row_cdf_.resize(static_cast<std::size_t>(q) * q);
  for (std::uint32_t v = 0; v < q; ++v) {
    double acc = 0;
    for (std::uint32_t w = 0; w < q; ++w) {
      acc += t.noise.at(static_cast<FieldElem>(v), static_cast<FieldElem>(w));
      row_cdf_[v * q + w] = acc;
    }
    row_cdf_[v * q + q - 1] = 1.0;  // guard against rounding in the last bin
  }
}

void LdmeOracle::sample(Rng& rng, FieldVector& x, FieldElem& label) {
  const std::uint32_t q = t_.spec.q();
  x.resize(t_.arity);
  for (auto& e : x) e = static_cast<FieldElem>(rng.uniform_u32(q));
  FieldElem v = t_.spec.chi(t_.alpha, x);
  double u = rng.uniform_double();
  const double* row = &row_cdf_[static_cast<std::size_t>(v) * q];
  std::uint32_t w = 0;
  while (w + 1 < q && u >= row[w]) ++w;
  label = static_cast<FieldElem>(w);
  ++draws_;
}

RestrictedOracle::RestrictedOracle(ExampleOracle& base, Restriction tau,
                                   std::uint32_t cap_multiplier)
    : base_(base), tau_(std::move(tau)) {
  const std::uint32_t n = base.arity();
  std::vector<bool> fixed(n, false);
  for (auto& [c, v] : tau_.assignments) {
    if (c >= n) throw ArityMismatch("restriction coordinate out of range");
    fixed[c] = true;
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (!fixed[i]) free_.push_back(i);
  std::uint64_t reject_factor = 1;
  for (std::uint32_t i = 0; i < tau_.size(); ++i) reject_factor *= base.spec().q();
  attempt_cap_ = static_cast<std::uint64_t>(cap_multiplier) * reject_factor;
}

void RestrictedOracle::sample(Rng& rng, FieldVector& x, FieldElem& label) {
  for (std::uint64_t attempt = 0; attempt < attempt_cap_; ++attempt) {
    base_.sample(rng, scratch_, label);
    bool ok = true;
    for (auto& [c, v] : tau_.assignments) {
      if (scratch_[c] != v) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    x.resize(free_.size());
    for (std::size_t i = 0; i < free_.size(); ++i) x[i] = scratch_[free_[i]];
    return;
  }
  throw BudgetExceeded("restricted oracle rejection cap");
}

}  // namespace fql
