#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fql/errors.hpp"

namespace fql {

// Field elements are packed into an integer in [0, q): the base-p digits of
// the value are the polynomial-basis coordinates, constant term least
// significant. All arithmetic goes through a FieldSpec.
using FieldElem = std::uint16_t;
using FieldVector = std::vector<FieldElem>;

// Immutable description of F_q, q = p^ell <= 2^16, with precomputed
// arithmetic, trace and character tables. Shareable across threads.
class FieldSpec {
 public:
  // Uses the built-in modulus (Conway polynomial) for p^ell.
  static FieldSpec make(std::uint32_t p, std::uint32_t ell);
  // Explicit modulus: monic, degree ell, coefficients constant-first.
  static FieldSpec make(std::uint32_t p, std::uint32_t ell, std::vector<std::uint16_t> modulus);

  std::uint32_t p() const { return p_; }
  std::uint32_t ell() const { return ell_; }
  std::uint32_t q() const { return q_; }
  const std::vector<std::uint16_t>& modulus() const { return modulus_; }

  FieldElem add(FieldElem a, FieldElem b) const {
    return small_ ? add_tab_[a * q_ + b] : add_big_(a, b);
  }
  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }
  FieldElem neg(FieldElem a) const { return neg_tab_[a]; }
  FieldElem mul(FieldElem a, FieldElem b) const {
    return small_ ? mul_tab_[a * q_ + b] : mul_big_(a, b);
  }
  FieldElem inv(FieldElem a) const {
    if (a == 0) throw InverseOfZero();
    return inv_tab_[a];
  }
  FieldElem pow(FieldElem a, std::uint64_t e) const;

  // Multiplication by a prime-subfield scalar c in [0, p).
  FieldElem scalar_mul(std::uint32_t c, FieldElem a) const { return mul(from_scalar(c), a); }
  // Embedding of F_p: residues are the constant polynomials.
  FieldElem from_scalar(std::uint32_t c) const { return static_cast<FieldElem>(c % p_); }

  // Tr(a) = sum of a^(p^j); lands in the prime subfield, returned in [0, p).
  std::uint32_t trace(FieldElem a) const { return trace_tab_[a]; }
  // e(a) = exp(2*pi*i*Tr(a)/p), a p-th root of unity.
  std::complex<double> chr(FieldElem a) const { return char_tab_[a]; }
  // conj(e(a)) = e(-a), available directly to avoid a negate per use.
  std::complex<double> chr_conj(FieldElem a) const { return char_tab_[neg_tab_[a]]; }

  // chi_alpha(x) = sum_i alpha_i * x_i.
  FieldElem chi(const FieldVector& alpha, const FieldVector& x) const;

  // Polynomial-basis coordinates of a, constant term first.
  std::vector<std::uint16_t> coords(FieldElem a) const;

  bool valid(FieldElem a) const { return a < q_; }

  // Text token `p:ell:c0,c1,...` and element token as base-p digits.
  std::string to_token() const;
  static FieldSpec from_token(const std::string& token);
  std::string elem_token(FieldElem a) const;
  FieldElem elem_from_token(const std::string& token) const;
  std::string vector_token(const FieldVector& v) const;
  FieldVector vector_from_token(const std::string& token) const;

 private:
  FieldSpec() = default;
  void build_tables_();
  FieldElem add_big_(FieldElem a, FieldElem b) const;
  FieldElem mul_big_(FieldElem a, FieldElem b) const;

  std::uint32_t p_ = 0, ell_ = 0, q_ = 0;
  bool small_ = false;  // q small enough for full q*q tables
  std::vector<std::uint16_t> modulus_;
  std::vector<FieldElem> add_tab_, mul_tab_;
  std::vector<FieldElem> neg_tab_, inv_tab_;
  std::vector<std::uint16_t> trace_tab_;
  std::vector<std::complex<double>> char_tab_;
  // x^(ell+i) mod modulus for i in [0, ell-1), as coefficient rows.
  std::vector<std::uint16_t> red_rows_;
};

// Conway polynomial for p^ell (coefficients constant-first, monic).
// Computed by the standard definition: minimal primitive polynomial, in the
// alternating-sign lexicographic order, compatible with all proper subfields.
std::vector<std::uint16_t> conway_polynomial(std::uint32_t p, std::uint32_t ell);

bool is_prime_u32(std::uint32_t n);

// Number of nonzero entries.
std::uint32_t weight(const FieldVector& alpha);

// First nonzero entry; throws ZeroVector on the zero vector.
FieldElem init_value(const FieldVector& alpha);

// One side of a cyclic half/half coordinate split. J holds ceil(n/2)
// cyclically consecutive coordinates starting at `start`.
struct Partition {
  std::uint32_t n = 0;
  std::uint32_t start = 0;

  std::uint32_t j_size() const { return (n + 1) / 2; }
  bool in_j(std::uint32_t i) const {
    std::uint32_t off = (i + n - start) % n;
    return off < j_size();
  }
  std::vector<std::uint32_t> j_indices() const;
  std::vector<std::uint32_t> jbar_indices() const;
};

// All n cyclic partitions of [n], the i-th starting at coordinate i.
std::vector<Partition> consecutive_partitions(std::uint32_t n);

// Entries outside the chosen side zeroed. side_j=true keeps J.
FieldVector restrict_vector(const FieldVector& alpha, const Partition& part, bool side_j);

}  // namespace fql
