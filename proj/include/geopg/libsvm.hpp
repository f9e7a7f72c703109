#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "geopg/sparse.hpp"

namespace geopg {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_number(const std::string& tok, long line_no, const char* what) {
  const char* s = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v))
    throw ParseError("malformed " + std::string(what) + " '" + tok + "' at line " +
                     std::to_string(line_no));
  return v;
}

}  // namespace detail

/* Reads LIBSVM-format text: one sample per line, "<label> <idx>:<val> ...",
 * indices 1-based and strictly increasing within a line.  Internally columns
 * are 0-based.  n defaults to the maximum index seen; n_override must be at
 * least that.  Blank lines are skipped. */
inline SparseDesign parse_libsvm(std::istream& in, std::optional<int> n_override = {}) {
  SparseDesign d;
  std::vector<double> labels;
  d.row_start.push_back(0);
  int max_col = 0;  // 1-based max index seen
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    labels.push_back(detail::parse_number(tok, line_no, "label"));
    int prev = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("malformed feature token '" + tok + "' at line " +
                         std::to_string(line_no));
      double idx_d = detail::parse_number(tok.substr(0, colon), line_no, "index");
      if (idx_d < 1 || idx_d != std::floor(idx_d))
        throw ParseError("invalid index in '" + tok + "' at line " + std::to_string(line_no));
      int idx = (int)idx_d;
      if (idx <= prev)
        throw ParseError("non-increasing index at line " + std::to_string(line_no));
      double v = detail::parse_number(tok.substr(colon + 1), line_no, "value");
      d.col.push_back(idx - 1);
      d.val.push_back(v);
      prev = idx;
      if (idx > max_col) max_col = idx;
    }
    d.row_start.push_back((std::int64_t)d.col.size());
  }
  d.p = (int)labels.size();
  d.n = max_col;
  if (n_override) {
    if (*n_override < max_col)
      throw ParseError("n override " + std::to_string(*n_override) +
                       " smaller than max index " + std::to_string(max_col));
    d.n = *n_override;
  }
  d.b = Eigen::Map<const Vector>(labels.data(), (Eigen::Index)labels.size());
  validate(d);
  return d;
}

inline SparseDesign parse_libsvm(const std::string& text, std::optional<int> n_override = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, n_override);
}

inline SparseDesign parse_libsvm_file(const std::string& path, std::optional<int> n_override = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_libsvm(in, n_override);
}

namespace detail {

inline std::string fmt_value(double v) {
  char buf[40];
  // integer-valued labels/values (e.g. +-1 classes) print without a decimal point
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", (long long)v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

}  // namespace detail

/* Inverse of parse_libsvm; parse(write(d)) reproduces d exactly. */
inline void write_libsvm(const SparseDesign& d, std::ostream& out) {
  for (int i = 0; i < d.p; ++i) {
    out << detail::fmt_value(d.b[i]);
    for (std::int64_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k)
      out << ' ' << (d.col[k] + 1) << ':' << detail::fmt_value(d.val[k]);
    out << '\n';
  }
}

inline std::string write_libsvm(const SparseDesign& d) {
  std::ostringstream out;
  write_libsvm(d, out);
  return out.str();
}

}  // namespace geopg
