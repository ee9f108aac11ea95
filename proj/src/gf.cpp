#include "fql/gf.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fql {
namespace {

// ---- polynomial arithmetic over F_p, coefficients constant-first ----------

using Poly = std::vector<std::uint16_t>;

Poly trim(Poly f) {
  while (f.size() > 1 && f.back() == 0) f.pop_back();
  return f;
}

int degree(const Poly& f) {
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
    if (f[i] != 0) return i;
  return -1;
}

Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = static_cast<std::uint16_t>((c[i + j] + a[i] * b[j]) % p);
  }
  return c;
}

// Remainder of a by monic divisor f.
Poly poly_mod(Poly a, const Poly& f, std::uint32_t p) {
  int df = degree(f);
  for (int i = static_cast<int>(a.size()) - 1; i >= df; --i) {
    std::uint32_t c = a[i];
    if (c == 0) continue;
    a[i] = 0;
    for (int j = 0; j < df; ++j)
      a[i - df + j] =
          static_cast<std::uint16_t>((a[i - df + j] + p * p - c * f[j] % p) % p);
  }
  a.resize(df, 0);
  if (a.empty()) a.push_back(0);
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, std::uint32_t p) {
  return poly_mod(poly_mul(a, b, p), f, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, std::uint32_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), f, p);
  while (e > 0) {
    if (e & 1) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

bool poly_is_one(const Poly& f) { return degree(f) == 0 && f[0] == 1; }
bool poly_is_zero(const Poly& f) { return degree(f) < 0; }

// Evaluate g at the residue class r modulo f.
Poly poly_eval_at(const Poly& g, const Poly& r, const Poly& f, std::uint32_t p) {
  Poly acc{0};
  for (int i = degree(g); i >= 0; --i) {
    acc = poly_mulmod(acc, r, f, p);
    acc[0] = static_cast<std::uint16_t>((acc[0] + g[i]) % p);
  }
  return acc;
}

// Trial division by every monic polynomial of degree 1..deg/2.
bool poly_is_irreducible(const Poly& f, std::uint32_t p) {
  int n = degree(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  for (int d = 1; d <= n / 2; ++d) {
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (std::uint64_t t = 0; t < count; ++t) {
      Poly g(d + 1, 0);
      g[d] = 1;
      std::uint64_t v = t;
      for (int i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint16_t>(v % p);
        v /= p;
      }
      if (poly_is_zero(poly_mod(f, g, p))) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(static_cast<std::uint32_t>(d));
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(static_cast<std::uint32_t>(n));
  return out;
}

// x generates the multiplicative group of F_p[x]/f.
bool poly_is_primitive(const Poly& f, std::uint32_t p) {
  int n = degree(f);
  std::uint64_t q = 1;
  for (int i = 0; i < n; ++i) q *= p;
  Poly x{0, 1};
  if (!poly_is_one(poly_powmod(x, q - 1, f, p))) return false;
  for (std::uint32_t r : prime_factors(q - 1))
    if (poly_is_one(poly_powmod(x, (q - 1) / r, f, p))) return false;
  return true;
}

std::map<std::pair<std::uint32_t, std::uint32_t>, Poly> g_conway_cache;
std::mutex g_conway_mutex;

Poly conway_impl(std::uint32_t p, std::uint32_t ell);

bool conway_compatible(const Poly& f, std::uint32_t p, std::uint32_t ell) {
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < ell; ++i) q *= p;
  for (std::uint32_t m = 1; m < ell; ++m) {
    if (ell % m != 0) continue;
    std::uint64_t qm = 1;
    for (std::uint32_t i = 0; i < m; ++i) qm *= p;
    Poly sub = conway_impl(p, m);
    Poly r = poly_powmod(Poly{0, 1}, (q - 1) / (qm - 1), f, p);
    if (!poly_is_zero(poly_eval_at(sub, r, f, p))) return false;
  }
  return true;
}

Poly conway_impl(std::uint32_t p, std::uint32_t ell) {
  {
    std::lock_guard<std::mutex> lock(g_conway_mutex);
    auto it = g_conway_cache.find({p, ell});
    if (it != g_conway_cache.end()) return it->second;
  }
  // Candidates x^n + a_{n-1}x^{n-1} + ... + a_0 enumerated in the standard
  // order: lexicographic over (c_{n-1}, ..., c_0) where a_i = (-1)^(n-i) c_i.
  std::uint32_t n = ell;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < n; ++i) count *= p;
  Poly result;
  for (std::uint64_t t = 0; t < count && result.empty(); ++t) {
    Poly f(n + 1, 0);
    f[n] = 1;
    std::uint64_t v = t;
    for (int i = 0; i < static_cast<int>(n); ++i) {  // c_0 varies fastest
      std::uint32_t c = static_cast<std::uint32_t>(v % p);
      v /= p;
      std::uint32_t a = ((n - i) % 2 == 0) ? c : (p - c) % p;
      f[i] = static_cast<std::uint16_t>(a);
    }
    if (!poly_is_irreducible(f, p)) continue;
    if (!poly_is_primitive(f, p)) continue;
    if (!conway_compatible(f, p, ell)) continue;
    result = f;
  }
  if (result.empty()) throw Error("conway polynomial search exhausted");
  std::lock_guard<std::mutex> lock(g_conway_mutex);
  g_conway_cache[{p, ell}] = result;
  return result;
}

constexpr std::uint32_t kSmallTableLimit = 1024;
constexpr const char* kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint16_t> conway_polynomial(std::uint32_t p, std::uint32_t ell) {
  if (!is_prime_u32(p)) throw Error("conway: p must be prime");
  if (ell < 1) throw Error("conway: ell must be >= 1");
  return conway_impl(p, ell);
}

FieldSpec FieldSpec::make(std::uint32_t p, std::uint32_t ell) {
  return make(p, ell, conway_polynomial(p, ell));
}

FieldSpec FieldSpec::make(std::uint32_t p, std::uint32_t ell,
                          std::vector<std::uint16_t> modulus) {
  if (!is_prime_u32(p)) throw Error("field: characteristic must be prime");
  if (ell < 1) throw Error("field: extension degree must be >= 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < ell; ++i) {
    q *= p;
    if (q > 65536) throw Error("field: order exceeds 2^16");
  }
  if (modulus.size() != ell + 1 || modulus[ell] != 1)
    throw Error("field: modulus must be monic of degree ell");
  for (auto c : modulus)
    if (c >= p) throw Error("field: modulus coefficient out of range");
  if (!poly_is_irreducible(Poly(modulus.begin(), modulus.end()), p))
    throw Error("field: modulus is reducible");

  FieldSpec s;
  s.p_ = p;
  s.ell_ = ell;
  s.q_ = static_cast<std::uint32_t>(q);
  s.modulus_ = std::move(modulus);
  s.small_ = (q <= kSmallTableLimit);
  s.build_tables_();
  return s;
}

void FieldSpec::build_tables_() {
  const std::uint32_t q = q_, p = p_, ell = ell_;

  // Reduction rows: x^(ell+i) mod modulus, for the big-field multiply path.
  {
    Poly mod(modulus_.begin(), modulus_.end());
    Poly x_pow(ell + 1, 0);
    x_pow[ell] = 1;
    Poly r = poly_mod(x_pow, mod, p);
    red_rows_.assign(ell * std::max<std::uint32_t>(ell - 1, 1), 0);
    for (std::uint32_t i = 0; i + 1 < ell; ++i) {
      if (i > 0) {
        // multiply by x and reduce
        Poly shifted(ell + 1, 0);
        for (std::uint32_t j = 0; j < ell; ++j) shifted[j + 1] = r[j];
        r = poly_mod(shifted, mod, p);
      }
      for (std::uint32_t j = 0; j < ell; ++j) red_rows_[i * ell + j] = r[j];
    }
  }

  neg_tab_.resize(q);
  for (std::uint32_t a = 0; a < q; ++a) {
    std::uint32_t v = a, r = 0, pw = 1;
    for (std::uint32_t i = 0; i < ell; ++i) {
      std::uint32_t d = v % p;
      v /= p;
      r += ((p - d) % p) * pw;
      pw *= p;
    }
    neg_tab_[a] = static_cast<FieldElem>(r);
  }

  if (small_) {
    add_tab_.resize(static_cast<std::size_t>(q) * q);
    mul_tab_.resize(static_cast<std::size_t>(q) * q);
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b)
        add_tab_[static_cast<std::size_t>(a) * q + b] = add_big_(
            static_cast<FieldElem>(a), static_cast<FieldElem>(b));
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = a; b < q; ++b) {
        FieldElem m = mul_big_(static_cast<FieldElem>(a), static_cast<FieldElem>(b));
        mul_tab_[static_cast<std::size_t>(a) * q + b] = m;
        mul_tab_[static_cast<std::size_t>(b) * q + a] = m;
      }
  }

  inv_tab_.assign(q, 0);
  for (std::uint32_t a = 1; a < q; ++a)
    inv_tab_[a] = pow(static_cast<FieldElem>(a), static_cast<std::uint64_t>(q) - 2);

  trace_tab_.resize(q);
  char_tab_.resize(q);
  for (std::uint32_t a = 0; a < q; ++a) {
    FieldElem t = static_cast<FieldElem>(a);
    FieldElem sum = static_cast<FieldElem>(a);
    for (std::uint32_t j = 1; j < ell; ++j) {
      t = pow(t, p);
      sum = add(sum, t);
    }
    assert(sum < p);  // trace lands in the prime subfield
    trace_tab_[a] = sum;
    double angle = 2.0 * std::numbers::pi * static_cast<double>(sum) / p;
    char_tab_[a] = {std::cos(angle), std::sin(angle)};
  }
}

FieldElem FieldSpec::add_big_(FieldElem a, FieldElem b) const {
  std::uint32_t va = a, vb = b, r = 0, pw = 1;
  for (std::uint32_t i = 0; i < ell_; ++i) {
    r += ((va % p_) + (vb % p_)) % p_ * pw;
    va /= p_;
    vb /= p_;
    pw *= p_;
  }
  return static_cast<FieldElem>(r);
}

FieldElem FieldSpec::mul_big_(FieldElem a, FieldElem b) const {
  const std::uint32_t p = p_, ell = ell_;
  std::uint32_t da[17], db[17];
  std::uint32_t conv[33] = {0};
  std::uint32_t va = a, vb = b;
  for (std::uint32_t i = 0; i < ell; ++i) {
    da[i] = va % p;
    va /= p;
    db[i] = vb % p;
    vb /= p;
  }
  for (std::uint32_t i = 0; i < ell; ++i) {
    if (da[i] == 0) continue;
    for (std::uint32_t j = 0; j < ell; ++j) conv[i + j] += da[i] * db[j];
  }
  // Fold coefficients of x^(ell+i) back using the reduction rows.
  std::uint32_t out[17];
  for (std::uint32_t j = 0; j < ell; ++j) out[j] = conv[j] % p;
  for (std::uint32_t i = 0; i + 1 < ell; ++i) {
    std::uint32_t c = conv[ell + i] % p;
    if (c == 0) continue;
    for (std::uint32_t j = 0; j < ell; ++j)
      out[j] = (out[j] + c * red_rows_[i * ell + j]) % p;
  }
  std::uint32_t r = 0, pw = 1;
  for (std::uint32_t j = 0; j < ell; ++j) {
    r += out[j] * pw;
    pw *= p;
  }
  return static_cast<FieldElem>(r);
}

FieldElem FieldSpec::pow(FieldElem a, std::uint64_t e) const {
  FieldElem r = 1, base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

FieldElem FieldSpec::chi(const FieldVector& alpha, const FieldVector& x) const {
  if (alpha.size() != x.size()) throw ArityMismatch("chi: vector lengths differ");
  FieldElem acc = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    acc = add(acc, mul(alpha[i], x[i]));
  }
  return acc;
}

std::vector<std::uint16_t> FieldSpec::coords(FieldElem a) const {
  std::vector<std::uint16_t> out(ell_);
  std::uint32_t v = a;
  for (std::uint32_t i = 0; i < ell_; ++i) {
    out[i] = static_cast<std::uint16_t>(v % p_);
    v /= p_;
  }
  return out;
}

std::string FieldSpec::to_token() const {
  std::ostringstream os;
  os << p_ << ':' << ell_ << ':';
  for (std::uint32_t i = 0; i <= ell_; ++i) {
    if (i) os << ',';
    os << modulus_[i];
  }
  return os.str();
}

FieldSpec FieldSpec::from_token(const std::string& token) {
  std::uint32_t p = 0, ell = 0;
  std::size_t c1 = token.find(':');
  std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : token.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ParseError("field token: " + token);
  try {
    p = static_cast<std::uint32_t>(std::stoul(token.substr(0, c1)));
    ell = static_cast<std::uint32_t>(std::stoul(token.substr(c1 + 1, c2 - c1 - 1)));
  } catch (const std::exception&) {
    throw ParseError("field token: " + token);
  }
  std::vector<std::uint16_t> mod;
  std::istringstream rest(token.substr(c2 + 1));
  std::string piece;
  while (std::getline(rest, piece, ','))
    mod.push_back(static_cast<std::uint16_t>(std::stoul(piece)));
  return make(p, ell, std::move(mod));
}

std::string FieldSpec::elem_token(FieldElem a) const {
  if (!valid(a)) throw ParseError("element out of range");
  if (a == 0) return "0";
  auto d = coords(a);
  std::string out;
  bool started = false;
  for (int i = static_cast<int>(ell_) - 1; i >= 0; --i) {
    if (!started && d[i] == 0) continue;
    started = true;
    if (p_ <= 36) {
      out.push_back(kDigits[d[i]]);
    } else {
      if (!out.empty()) out.push_back('.');
      out += std::to_string(d[i]);
    }
  }
  return out;
}

FieldElem FieldSpec::elem_from_token(const std::string& token) const {
  if (token.empty()) throw ParseError("empty element token");
  std::uint32_t v = 0;
  if (p_ <= 36) {
    for (char ch : token) {
      const char* pos = std::char_traits<char>::find(kDigits, 36, ch);
      if (pos == nullptr || static_cast<std::uint32_t>(pos - kDigits) >= p_)
        throw ParseError("element token: " + token);
      v = v * p_ + static_cast<std::uint32_t>(pos - kDigits);
      if (v >= q_) throw ParseError("element token out of range: " + token);
    }
  } else {
    std::istringstream is(token);
    std::string piece;
    while (std::getline(is, piece, '.')) {
      std::uint32_t d = static_cast<std::uint32_t>(std::stoul(piece));
      if (d >= p_) throw ParseError("element token: " + token);
      v = v * p_ + d;
      if (v >= q_) throw ParseError("element token out of range: " + token);
    }
  }
  return static_cast<FieldElem>(v);
}

std::string FieldSpec::vector_token(const FieldVector& v) const {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += elem_token(v[i]);
  }
  return out;
}

FieldVector FieldSpec::vector_from_token(const std::string& token) const {
  FieldVector out;
  if (token.empty()) return out;
  std::istringstream is(token);
  std::string piece;
  while (std::getline(is, piece, ',')) out.push_back(elem_from_token(piece));
  return out;
}

std::uint32_t weight(const FieldVector& alpha) {
  std::uint32_t w = 0;
  for (auto a : alpha)
    if (a != 0) ++w;
  return w;
}

FieldElem init_value(const FieldVector& alpha) {
  for (auto a : alpha)
    if (a != 0) return a;
  throw ZeroVector();
}

std::vector<std::uint32_t> Partition::j_indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(j_size());
  for (std::uint32_t i = 0; i < n; ++i)
    if (in_j(i)) out.push_back(i);
  return out;
}

std::vector<std::uint32_t> Partition::jbar_indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(n - j_size());
  for (std::uint32_t i = 0; i < n; ++i)
    if (!in_j(i)) out.push_back(i);
  return out;
}

std::vector<Partition> consecutive_partitions(std::uint32_t n) {
  std::vector<Partition> out;
  out.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s) out.push_back(Partition{n, s});
  return out;
}

FieldVector restrict_vector(const FieldVector& alpha, const Partition& part, bool side_j) {
  FieldVector out(alpha.size(), 0);
  for (std::uint32_t i = 0; i < alpha.size(); ++i)
    if (part.in_j(i) == side_j) out[i] = alpha[i];
  return out;
}

}  // namespace fql
