#pragma once

// Matrix files: a "dim 2n" header, then 2n rows of 2n whitespace-separated
// numbers. Writers print 17 significant digits, which reads back bit-exactly.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "lqs/error.hpp"
#include "lqs/report.hpp"
#include "lqs/types.hpp"

namespace lqs {

inline std::string format_matrix(const Mat& m) {
  std::string out = "dim " + std::to_string(m.rows()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Mat parse_matrix(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  long dim = 0;
  if (!(is >> word) || word != "dim") throw Error(ErrorKind::parse, "matrix file: expected 'dim' header");
  if (!(is >> word)) throw Error(ErrorKind::parse, "matrix file: missing dimension");
  try {
    std::size_t used = 0;
    dim = std::stol(word, &used);
    if (used != word.size()) throw Error(ErrorKind::parse, "matrix file: bad dimension '" + word + "'");
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::parse, "matrix file: bad dimension '" + word + "'");
  }
  if (dim < 2 || dim % 2 != 0 || dim > 4096)
    throw Error(ErrorKind::parse, "matrix file: dimension must be a positive even number");
  Mat m(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) {
      if (!(is >> word)) throw Error(ErrorKind::parse, "matrix file: too few entries");
      m(i, j) = parse_double(word);
    }
  if (is >> word) throw Error(ErrorKind::parse, "matrix file: trailing data '" + word + "'");
  if (!m.allFinite()) throw Error(ErrorKind::parse, "matrix file: non-finite entry");
  return m;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Mat read_matrix_file(const std::filesystem::path& path) { return parse_matrix(read_file(path)); }

/// Writes to a sibling temporary and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::parse, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::parse, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::parse, "cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

inline void write_matrix_file(const std::filesystem::path& path, const Mat& m) {
  write_file_atomic(path, format_matrix(m));
}

}  // namespace lqs
