#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fql/gf.hpp"
#include "fql/rng.hpp"
#include "fql/targets.hpp"

namespace fql {

// Partial assignment; coordinates are original indices, kept sorted.
struct Restriction {
  std::vector<std::pair<std::uint32_t, FieldElem>> assignments;

  std::uint32_t size() const { return static_cast<std::uint32_t>(assignments.size()); }
  void set(std::uint32_t coord, FieldElem value);
};

// The only access channel a learner gets: draws (x, label) with x uniform.
// draws() reports real base-oracle samples, through any wrapper stack.
class ExampleOracle {
 public:
  virtual ~ExampleOracle() = default;
  virtual void sample(Rng& rng, FieldVector& x, FieldElem& label) = 0;
  virtual std::uint32_t arity() const = 0;
  virtual const FieldSpec& spec() const = 0;
  virtual std::uint64_t draws() const = 0;
};

class JuntaOracle final : public ExampleOracle {
 public:
  explicit JuntaOracle(const JuntaFunction& f) : f_(f) {}
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override;
  std::uint32_t arity() const override { return f_.arity; }
  const FieldSpec& spec() const override { return f_.spec; }
  std::uint64_t draws() const override { return draws_; }

 private:
  const JuntaFunction& f_;
  std::uint64_t draws_ = 0;
};

class LdmeOracle final : public ExampleOracle {
 public:
  explicit LdmeOracle(const LdmeTarget& t);
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override;
  std::uint32_t arity() const override { return t_.arity; }
  const FieldSpec& spec() const override { return t_.spec; }
  std::uint64_t draws() const override { return draws_; }

 private:
  const LdmeTarget& t_;
  std::vector<double> row_cdf_;  // q rows of cumulative channel mass
  std::uint64_t draws_ = 0;
};

// Rejection-samples the base oracle until the example matches tau, then
// emits the free coordinates (ascending original order) with the label.
// Throws BudgetExceeded after cap_multiplier * q^|tau| failed draws.
class RestrictedOracle final : public ExampleOracle {
 public:
  RestrictedOracle(ExampleOracle& base, Restriction tau, std::uint32_t cap_multiplier = 64);
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override;
  std::uint32_t arity() const override { return static_cast<std::uint32_t>(free_.size()); }
  const FieldSpec& spec() const override { return base_.spec(); }
  std::uint64_t draws() const override { return base_.draws(); }
  // Original index of compacted coordinate i.
  std::uint32_t original_index(std::uint32_t i) const { return free_[i]; }

 private:
  ExampleOracle& base_;
  Restriction tau_;
  std::vector<std::uint32_t> free_;
  std::uint64_t attempt_cap_;
  FieldVector scratch_;
};

// Labels multiplied by a fixed constant; x untouched.
class ScaledOracle final : public ExampleOracle {
 public:
  ScaledOracle(ExampleOracle& base, FieldElem c) : base_(base), c_(c) {}
  void sample(Rng& rng, FieldVector& x, FieldElem& label) override {
    base_.sample(rng, x, label);
    label = spec().mul(c_, label);
  }
  std::uint32_t arity() const override { return base_.arity(); }
  const FieldSpec& spec() const override { return base_.spec(); }
  std::uint64_t draws() const override { return base_.draws(); }

 private:
  ExampleOracle& base_;
  FieldElem c_;
};

}  // namespace fql
