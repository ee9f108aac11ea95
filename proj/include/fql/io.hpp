#pragma once

#include <iosfwd>
#include <string>

#include "fql/lbp.hpp"
#include "fql/targets.hpp"

namespace fql {

// Line-oriented instance files. Coordinates are 1-based in files and reports.
//
//   junta p ell n k
//   <relevant coordinates, space separated, possibly empty line>
//   <q^k table element tokens, space separated>
//
//   ldme p ell n rho
//   <alpha vector token>
//   <q rows of q channel probabilities>
//
//   lbp N d rho
//   <N lines: d characters from {+,-}, a space, the column label>

void write_junta(std::ostream& os, const JuntaFunction& f);
JuntaFunction read_junta(std::istream& is);

void write_ldme(std::ostream& os, const LdmeTarget& t);
LdmeTarget read_ldme(std::istream& is);

void write_lbp(std::ostream& os, const LbpInstance& inst);
LbpInstance read_lbp(std::istream& is);

void save_file(const std::string& path, const std::string& contents);
std::string load_file(const std::string& path);

}  // namespace fql
