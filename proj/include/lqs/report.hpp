#pragma once

// Verification reports and their structured-text form: an indented
// "key: value" tree, two spaces per level, doubles printed with 17
// significant digits so that parse(format(x)) == x.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lqs/error.hpp"
#include "lqs/types.hpp"

namespace lqs {

struct TextNode {
  std::string key;
  std::string value;
  std::vector<TextNode> children;

  TextNode& add(std::string k, std::string v = {}) {
    children.push_back({std::move(k), std::move(v), {}});
    return children.back();
  }

  const TextNode* find(std::string_view k) const {
    for (const auto& c : children)
      if (c.key == k) return &c;
    return nullptr;
  }

  const TextNode& at(std::string_view k) const {
    const TextNode* c = find(k);
    if (!c) throw Error(ErrorKind::parse, "missing key '" + std::string(k) + "'");
    return *c;
  }

  bool operator==(const TextNode&) const = default;
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::parse, "not a number: '" + s + "'");
  return v;
}

namespace detail {
inline void emit(std::ostringstream& os, const TextNode& node, int depth) {
  os << std::string(2 * depth, ' ') << node.key << ':';
  if (!node.value.empty()) os << ' ' << node.value;
  os << '\n';
  for (const auto& c : node.children) emit(os, c, depth + 1);
}
}  // namespace detail

/// Serializes the children of `root` (the root itself has no line).
inline std::string to_text(const TextNode& root) {
  std::ostringstream os;
  for (const auto& c : root.children) detail::emit(os, c, 0);
  return os.str();
}

inline TextNode parse_text(std::string_view text) {
  TextNode root;
  std::vector<std::pair<int, TextNode*>> stack{{-1, &root}};
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent % 2 != 0) throw Error(ErrorKind::parse, "odd indentation at line " + std::to_string(line_no));
    const int depth = static_cast<int>(indent / 2);
    const auto colon = line.find(':', indent);
    if (colon == std::string_view::npos) throw Error(ErrorKind::parse, "missing ':' at line " + std::to_string(line_no));
    std::string key(line.substr(indent, colon - indent));
    std::string value;
    if (colon + 1 < line.size()) {
      if (line[colon + 1] != ' ') throw Error(ErrorKind::parse, "expected ': ' at line " + std::to_string(line_no));
      value = std::string(line.substr(colon + 2));
    }
    while (stack.back().first >= depth) stack.pop_back();
    if (stack.back().first != depth - 1)
      throw Error(ErrorKind::parse, "indentation jump at line " + std::to_string(line_no));
    TextNode& child = stack.back().second->add(std::move(key), std::move(value));
    stack.emplace_back(depth, &child);
  }
  return root;
}

struct TrialRecord {
  int index = 0;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string check_name;
  int trials = 0;
  double max_defect = 0.0;      ///< defect of the worst trial (largest defect / tolerance)
  double tolerance_used = 0.0;  ///< tolerance of that trial
  bool pass = false;
  bool applicable = true;       ///< false when a hypothesis of the check is not met
  bool expect_failure = false;  ///< negative controls
  std::map<std::string, double> fitted;
  std::map<std::string, Mat> fitted_matrices;
  std::vector<TrialRecord> per_trial;
  std::vector<std::string> notes;

  /// A negative control "succeeds" by failing.
  bool as_expected() const { return applicable && pass != expect_failure; }

  void add_trial(double defect, double tolerance) {
    const int idx = static_cast<int>(per_trial.size());
    per_trial.push_back({idx, defect, tolerance, defect <= tolerance});
  }

  /// Recomputes the summary from per_trial; pass <=> max_defect <= tolerance_used.
  void finalize() {
    trials = static_cast<int>(per_trial.size());
    pass = applicable && !per_trial.empty();
    double worst_ratio = -1.0;
    double raw_max = 0.0;
    for (const auto& t : per_trial) {
      pass = pass && t.pass;
      raw_max = std::max(raw_max, t.defect);
      const double ratio = t.tolerance > 0.0 ? t.defect / t.tolerance
                                             : (t.defect > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        max_defect = t.defect;
        tolerance_used = t.tolerance;
      }
    }
    if (!per_trial.empty()) fitted["raw_max_defect"] = raw_max;
  }
};

inline void add_matrix(TextNode& parent, const std::string& key, const Mat& m) {
  TextNode& node = parent.add(key, std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) row += ' ';
      row += format_double(m(i, j));
    }
    node.add("row", row);
  }
}

inline Mat read_matrix_node(const TextNode& node) {
  const auto x = node.value.find('x');
  if (x == std::string::npos) throw Error(ErrorKind::parse, "matrix shape expected");
  const int r = std::stoi(node.value.substr(0, x));
  const int c = std::stoi(node.value.substr(x + 1));
  if (static_cast<int>(node.children.size()) != r) throw Error(ErrorKind::parse, "matrix row count mismatch");
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    std::istringstream is(node.children[i].value);
    for (int j = 0; j < c; ++j) {
      std::string tok;
      if (!(is >> tok)) throw Error(ErrorKind::parse, "matrix row too short");
      m(i, j) = parse_double(tok);
    }
  }
  return m;
}

inline TextNode to_tree(const VerificationReport& r) {
  TextNode node{"check", {}, {}};
  node.add("name", r.check_name);
  node.add("trials", std::to_string(r.trials));
  node.add("max_defect", format_double(r.max_defect));
  node.add("tolerance_used", format_double(r.tolerance_used));
  node.add("pass", r.pass ? "true" : "false");
  node.add("applicable", r.applicable ? "true" : "false");
  node.add("expect_failure", r.expect_failure ? "true" : "false");
  node.add("as_expected", r.as_expected() ? "true" : "false");
  if (!r.notes.empty()) {
    auto& notes = node.add("notes");
    for (const auto& s : r.notes) notes.add("note", s);
  }
  if (!r.fitted.empty() || !r.fitted_matrices.empty()) {
    auto& fit = node.add("fitted");
    for (const auto& [k, v] : r.fitted) fit.add(k, format_double(v));
    for (const auto& [k, m] : r.fitted_matrices) add_matrix(fit, k, m);
  }
  auto& trials = node.add("per_trial");
  for (const auto& t : r.per_trial)
    trials.add("trial", std::to_string(t.index) + " " + format_double(t.defect) + " " + format_double(t.tolerance) +
                            (t.pass ? " pass" : " fail"));
  return node;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorKind::parse, "not a boolean: '" + s + "'");
}

inline VerificationReport from_tree(const TextNode& node) {
  VerificationReport r;
  r.check_name = node.at("name").value;
  r.trials = std::stoi(node.at("trials").value);
  r.max_defect = parse_double(node.at("max_defect").value);
  r.tolerance_used = parse_double(node.at("tolerance_used").value);
  r.pass = parse_bool(node.at("pass").value);
  r.applicable = parse_bool(node.at("applicable").value);
  r.expect_failure = parse_bool(node.at("expect_failure").value);
  if (const auto* notes = node.find("notes"))
    for (const auto& c : notes->children) r.notes.push_back(c.value);
  if (const auto* fit = node.find("fitted")) {
    for (const auto& c : fit->children) {
      if (c.children.empty() && c.value.find('x') == std::string::npos)
        r.fitted[c.key] = parse_double(c.value);
      else
        r.fitted_matrices[c.key] = read_matrix_node(c);
    }
  }
  for (const auto& c : node.at("per_trial").children) {
    std::istringstream is(c.value);
    std::string idx, d, t, p;
    if (!(is >> idx >> d >> t >> p)) throw Error(ErrorKind::parse, "bad trial record");
    r.per_trial.push_back({std::stoi(idx), parse_double(d), parse_double(t), p == "pass"});
  }
  return r;
}

/// Comma-separated form: one row per trial.
inline std::string to_csv(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  os << "check,trial,defect,tolerance,pass\n";
  for (const auto& r : reports)
    for (const auto& t : r.per_trial)
      os << r.check_name << ',' << t.index << ',' << format_double(t.defect) << ',' << format_double(t.tolerance) << ','
         << (t.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace lqs
