#include "fql/lbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fql/errors.hpp"

namespace fql {
namespace {

// Smaller-is-better ordering key for a result pair.
std::pair<const std::string*, const std::string*> label_key(const LbpInstance& inst,
                                                            std::uint32_t i, std::uint32_t j) {
  const std::string *a = &inst.labels[i], *b = &inst.labels[j];
  if (*b < *a) std::swap(a, b);
  return {a, b};
}

bool key_less(const std::pair<const std::string*, const std::string*>& x,
              const std::pair<const std::string*, const std::string*>& y) {
  if (*x.first != *y.first) return *x.first < *y.first;
  return *x.second < *y.second;
}

struct Best {
  bool any = false;
  std::int64_t score = 0;
  std::uint32_t i = 0, j = 0;
  std::pair<const std::string*, const std::string*> key{nullptr, nullptr};

  void offer(const LbpInstance& inst, std::uint32_t a, std::uint32_t b, std::int64_t s) {
    auto k = label_key(inst, a, b);
    if (!any || s > score || (s == score && key_less(k, key))) {
      any = true;
      score = s;
      i = a;
      j = b;
      key = k;
    }
  }

  std::optional<LbpResult> finish(const LbpInstance& inst, double threshold_rho) const {
    if (!any) return std::nullopt;
    if (static_cast<double>(score) < threshold_rho * inst.rows / 2.0) return std::nullopt;
    LbpResult r;
    r.score = score;
    r.i = std::min(i, j);
    r.j = std::max(i, j);
    r.label_i = inst.labels[r.i];
    r.label_j = inst.labels[r.j];
    return r;
  }
};

}  // namespace

std::int64_t LbpInstance::pair_score(std::uint32_t i, std::uint32_t j) const {
  const std::uint64_t* a = col(i);
  const std::uint64_t* b = col(j);
  std::uint32_t w = words_per_col();
  std::int64_t disagree = 0;
  for (std::uint32_t t = 0; t < w; ++t) disagree += std::popcount(a[t] ^ b[t]);
  return static_cast<std::int64_t>(rows) - 2 * disagree;
}

std::pair<LbpInstance, PlantedPair> gen_planted(std::uint32_t n_cols, std::uint32_t d,
                                                double rho, Rng& rng) {
  if (n_cols < 2) throw Error("gen_planted: need at least two columns");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error("gen_planted: rho out of range");
  LbpInstance inst;
  inst.num_cols = n_cols;
  inst.rows = d;
  inst.rho = rho;
  inst.labels.resize(n_cols);
  for (std::uint32_t i = 0; i < n_cols; ++i) inst.labels[i] = std::to_string(i);
  const std::uint32_t w = inst.words_per_col();
  inst.bits.assign(std::size_t(n_cols) * w, 0);

  PlantedPair pair;
  pair.i = rng.uniform_u32(n_cols);
  do {
    pair.j = rng.uniform_u32(n_cols);
  } while (pair.j == pair.i);
  if (pair.i > pair.j) std::swap(pair.i, pair.j);

  const std::uint64_t tail_mask = (d % 64) ? ((1ull << (d % 64)) - 1) : ~0ull;
  for (std::uint32_t c = 0; c < n_cols; ++c) {
    if (c == pair.j) continue;
    std::uint64_t* dst = inst.col(c);
    for (std::uint32_t t = 0; t < w; ++t) dst[t] = rng.next_u64();
    dst[w - 1] &= tail_mask;
  }
  // partner: copy and flip each row with probability (1-rho)/2
  const double flip = (1.0 - rho) / 2.0;
  std::uint64_t* src = inst.col(pair.i);
  std::uint64_t* dst = inst.col(pair.j);
  for (std::uint32_t r = 0; r < d; ++r) {
    std::uint64_t bit = (src[r >> 6] >> (r & 63)) & 1;
    if (rng.coin(flip)) bit ^= 1;
    dst[r >> 6] |= bit << (r & 63);
  }
  return {std::move(inst), pair};
}

std::optional<LbpResult> solve_naive(const LbpInstance& inst, double threshold_rho) {
  Best best;
  for (std::uint32_t i = 0; i < inst.num_cols; ++i)
    for (std::uint32_t j = i + 1; j < inst.num_cols; ++j)
      best.offer(inst, i, j, inst.pair_score(i, j));
  return best.finish(inst, threshold_rho);
}

std::optional<LbpResult> solve_grouped(const LbpInstance& inst, double threshold_rho,
                                       std::uint32_t group_size) {
  const std::uint32_t n = inst.num_cols, d = inst.rows;
  std::uint32_t g = group_size;
  if (g == 0) g = static_cast<std::uint32_t>(std::ceil(std::cbrt(static_cast<double>(n))));
  g = std::max(1u, std::min(g, n));
  const std::uint32_t num_groups = (n + g - 1) / g;

  // integer group sums, one row-major vector per group
  std::vector<std::int32_t> sums(std::size_t(num_groups) * d, 0);
  for (std::uint32_t c = 0; c < n; ++c) {
    std::int32_t* dst = sums.data() + std::size_t(c / g) * d;
    for (std::uint32_t r = 0; r < d; ++r) dst[r] += 1;  // all-plus baseline
    const std::uint64_t* words = inst.col(c);
    for (std::uint32_t t = 0; t < inst.words_per_col(); ++t) {
      std::uint64_t w = words[t];
      while (w) {
        std::uint32_t r = (t << 6) + std::countr_zero(w);
        dst[r] -= 2;
        w &= w - 1;
      }
    }
  }

  struct Cand {
    std::int64_t value;
    std::uint32_t u, v;
  };
  std::vector<Cand> cands;
  cands.reserve(std::size_t(num_groups) * (num_groups + 1) / 2);
  // group-pair sums stay below 2^31 whenever g^2 d does; wide path otherwise
  const bool narrow = static_cast<std::uint64_t>(g) * g * d < (1u << 30);
  for (std::uint32_t u = 0; u < num_groups; ++u) {
    const std::int32_t* su = sums.data() + std::size_t(u) * d;
    for (std::uint32_t v = u; v < num_groups; ++v) {
      const std::int32_t* sv = sums.data() + std::size_t(v) * d;
      std::int64_t dot = 0;
      if (narrow) {
        std::int32_t acc = 0;
        for (std::uint32_t r = 0; r < d; ++r) acc += su[r] * sv[r];
        dot = acc;
      } else {
        for (std::uint32_t r = 0; r < d; ++r) dot += std::int64_t(su[r]) * sv[r];
      }
      if (u == v) {
        std::uint32_t size_u = std::min(g, n - u * g);
        dot = (dot - std::int64_t(size_u) * d) / 2;  // drop self products
      }
      cands.push_back({dot, u, v});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  std::size_t take = std::min<std::size_t>(
      cands.size(), static_cast<std::size_t>(std::ceil(2.0 * n / g)));
  // keep ties with the boundary value so no equally-good candidate is cut
  while (take < cands.size() && cands[take].value == cands[take - 1].value) ++take;

  Best best;
  for (std::size_t t = 0; t < take; ++t) {
    const auto [value, u, v] = cands[t];
    std::uint32_t ubegin = u * g, uend = std::min(n, (u + 1) * g);
    std::uint32_t vbegin = v * g, vend = std::min(n, (v + 1) * g);
    if (u == v) {
      for (std::uint32_t a = ubegin; a < uend; ++a)
        for (std::uint32_t b = a + 1; b < uend; ++b)
          best.offer(inst, a, b, inst.pair_score(a, b));
    } else {
      for (std::uint32_t a = ubegin; a < uend; ++a)
        for (std::uint32_t b = vbegin; b < vend; ++b)
          best.offer(inst, a, b, inst.pair_score(a, b));
    }
  }
  return best.finish(inst, threshold_rho);
}

std::optional<LbpResult> solve_lbp(const LbpInstance& inst, double threshold_rho,
                                   LbpBackend backend) {
  return backend == LbpBackend::kNaive ? solve_naive(inst, threshold_rho)
                                       : solve_grouped(inst, threshold_rho);
}

}  // namespace fql
