#include "fql/io.hpp"

#include <fstream>
#include <sstream>

#include "fql/errors.hpp"

namespace fql {
namespace {

std::string expect_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(std::string("missing ") + what);
  return line;
}

}  // namespace

void write_junta(std::ostream& os, const JuntaFunction& f) {
  os << "junta " << f.spec.p() << ' ' << f.spec.ell() << ' ' << f.arity << ' '
     << f.relevant.size() << '\n';
  for (std::size_t i = 0; i < f.relevant.size(); ++i)
    os << (i ? " " : "") << f.relevant[i] + 1;
  os << '\n';
  for (std::size_t i = 0; i < f.table.size(); ++i)
    os << (i ? " " : "") << f.spec.elem_token(f.table[i]);
  os << '\n';
}

JuntaFunction read_junta(std::istream& is) {
  std::istringstream header(expect_line(is, "junta header"));
  std::string tag;
  std::uint32_t p = 0, ell = 0, n = 0, k = 0;
  header >> tag >> p >> ell >> n >> k;
  if (tag != "junta" || header.fail()) throw ParseError("junta header");
  JuntaFunction f{FieldSpec::make(p, ell), n, {}, {}};

  std::istringstream rel(expect_line(is, "relevant list"));
  std::uint32_t coord = 0;
  while (rel >> coord) {
    if (coord < 1 || coord > n) throw ParseError("relevant coordinate out of range");
    f.relevant.push_back(coord - 1);
  }
  if (f.relevant.size() != k) throw ParseError("relevant count mismatch");
  for (std::size_t i = 1; i < f.relevant.size(); ++i)
    if (f.relevant[i - 1] >= f.relevant[i]) throw ParseError("relevant list not sorted");

  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < k; ++i) size *= f.spec.q();
  std::istringstream table(expect_line(is, "table"));
  std::string token;
  while (table >> token) f.table.push_back(f.spec.elem_from_token(token));
  if (f.table.size() != size) throw ParseError("table size mismatch");
  return f;
}

void write_ldme(std::ostream& os, const LdmeTarget& t) {
  os << "ldme " << t.spec.p() << ' ' << t.spec.ell() << ' ' << t.arity << ' '
     << t.exact_cor << '\n';
  os << t.spec.vector_token(t.alpha) << '\n';
  const std::uint32_t q = t.spec.q();
  os.precision(17);
  for (std::uint32_t v = 0; v < q; ++v) {
    for (std::uint32_t w = 0; w < q; ++w) os << (w ? " " : "") << t.noise.at(v, w);
    os << '\n';
  }
}

LdmeTarget read_ldme(std::istream& is) {
  std::istringstream header(expect_line(is, "ldme header"));
  std::string tag;
  std::uint32_t p = 0, ell = 0, n = 0;
  double rho = 0;
  header >> tag >> p >> ell >> n >> rho;
  if (tag != "ldme" || header.fail()) throw ParseError("ldme header");
  auto spec = FieldSpec::make(p, ell);
  FieldVector alpha = spec.vector_from_token(expect_line(is, "alpha"));
  if (alpha.size() != n) throw ParseError("alpha arity mismatch");
  const std::uint32_t q = spec.q();
  std::vector<double> rows(static_cast<std::size_t>(q) * q);
  for (std::uint32_t v = 0; v < q; ++v) {
    std::istringstream row(expect_line(is, "channel row"));
    for (std::uint32_t w = 0; w < q; ++w)
      if (!(row >> rows[v * q + w])) throw ParseError("channel row too short");
  }
  auto target = make_ldme_target(spec, n, std::move(alpha), NoiseModel::make(spec, rows));
  if (std::abs(target.exact_cor - rho) > 1e-6)
    throw ParseError("declared correlation disagrees with the channel");
  return target;
}

void write_lbp(std::ostream& os, const LbpInstance& inst) {
  os << "lbp " << inst.num_cols << ' ' << inst.rows << ' ' << inst.rho << '\n';
  for (std::uint32_t c = 0; c < inst.num_cols; ++c) {
    for (std::uint32_t r = 0; r < inst.rows; ++r)
      os << (inst.entry(c, r) > 0 ? '+' : '-');
    os << ' ' << inst.labels[c] << '\n';
  }
}

LbpInstance read_lbp(std::istream& is) {
  std::istringstream header(expect_line(is, "lbp header"));
  std::string tag;
  std::uint32_t n = 0, d = 0;
  double rho = 0;
  header >> tag >> n >> d >> rho;
  if (tag != "lbp" || header.fail()) throw ParseError("lbp header");
  LbpInstance inst;
  inst.num_cols = n;
  inst.rows = d;
  inst.rho = rho;
  inst.labels.resize(n);
  inst.bits.assign(std::size_t(n) * inst.words_per_col(), 0);
  for (std::uint32_t c = 0; c < n; ++c) {
    std::istringstream line(expect_line(is, "lbp column"));
    std::string signs;
    line >> signs >> inst.labels[c];
    if (signs.size() != d || inst.labels[c].empty()) throw ParseError("lbp column line");
    for (std::uint32_t r = 0; r < d; ++r) {
      if (signs[r] == '-')
        inst.set_minus(c, r);
      else if (signs[r] != '+')
        throw ParseError("lbp column characters");
    }
  }
  return inst;
}

void save_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << contents;
}

std::string load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace fql
