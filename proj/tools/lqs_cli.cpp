// lqs: evaluate the Maslov quasi-state, decompose skew-symplectic matrices,
// run the verification suites, and dump convergence traces.
//
// Exit codes: 0 ok, 1 suite failure, 2 parse/usage, 3 not in sp(2n),
// 4 method precondition, 5 not semi-simple.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lqs/lqs.hpp"

namespace fs = std::filesystem;
using namespace lqs;

namespace {

enum Exit { ok = 0, suite_failed = 1, parse_failed = 2, not_in_sp = 3, method_precondition = 4, not_semisimple = 5 };

struct RunConfig {
  int n = 3;
  std::uint64_t seed = 1;
  double t_max = 2000.0;
  double dt = 0.05;
  double tol = 1e-2;
  int trials = 50;
  std::string out;
  std::string format = "structured-text";

  MaslovLimitConfig limit() const { return {t_max, dt, tol, 12}; }

  void validate() const {
    if (n < 1 || trials < 1 || !(t_max > 0) || !(dt > 0) || !(tol > 0))
      throw Error(ErrorKind::parse, "configuration: n, trials, t-max, dt and tol must be positive");
    limit().validate();
  }
};

fs::path output_path(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv("LQS_OUTPUT_DIR");
  return fs::path(dir && *dir ? dir : ".") / default_name;
}

SpElement load_element(const std::string& file) {
  const Mat m = read_matrix_file(file);
  return SpElement::from_matrix(m);
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(const std::string& file, const std::string& method, const RunConfig& cfg) {
  const SpElement b = load_element(file);
  double value = 0.0, bar = 0.0;
  std::string used = method;
  try {
    if (method == "dim2") {
      value = maslov_dim2(b);
    } else if (method == "spectral") {
      const auto e = maslov_spectral_evaluation(b);
      value = e.value;
      bar = e.error_bar;
    } else if (method == "limit") {
      const auto e = maslov_limit(b, cfg.limit());
      value = e.value;
      bar = e.error_bar;
    } else {
      try {
        const auto e = maslov_spectral_evaluation(b);
        value = e.value;
        bar = e.error_bar;
        used = "spectral";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::not_semisimple) throw;
        const auto l = maslov_limit(b, cfg.limit());
        value = l.value;
        bar = l.error_bar;
        used = "limit";
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse || e.kind() == ErrorKind::not_in_algebra) throw;
    std::cerr << "error: " << e.what() << '\n';
    return method_precondition;
  }
  std::cout << "value: " << format_double(value) << '\n'
            << "error_bar: " << format_double(bar) << '\n'
            << "method: " << used << '\n';
  return ok;
}

// ---- decompose --------------------------------------------------------------

int cmd_decompose(const std::string& file, const RunConfig& cfg) {
  const SpElement b = load_element(file);
  WilliamsonDecomposition w;
  try {
    w = williamson_decompose(b);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::not_semisimple) throw;
    std::cerr << "error: " << e.what() << '\n';
    return not_semisimple;
  }
  const fs::path s_path = output_path(cfg.out, fs::path(file).stem().string() + ".frame.txt");
  write_matrix_file(s_path, w.S);

  TextNode root;
  auto& node = root.add("decomposition");
  node.add("n", std::to_string(w.n()));
  node.add("frame_file", s_path.string());
  node.add("reconstruction_residual", format_double(w.reconstruction_residual));
  node.add("symplectic_defect", format_double(w.symplectic_defect));
  auto& blocks = node.add("blocks");
  for (const auto& blk : w.blocks) {
    auto& bn = blocks.add("block", to_string(blk.type));
    bn.add("a", format_double(blk.a));
    bn.add("b", format_double(blk.b));
    std::string planes;
    for (int p : blk.planes) planes += (planes.empty() ? "" : " ") + std::to_string(p + 1);
    bn.add("planes", planes);
  }
  std::cout << to_text(root);
  return ok;
}

// ---- verify -----------------------------------------------------------------

const std::vector<std::string> kSuites = {"quasi-linearity", "ad-invariance", "gleason", "rank-one",
                                          "isotropic",       "main-theorem"};

Mat random_square(int dim, Rng& rng) {
  Mat m(dim, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

std::vector<VerificationReport> run_suite(const std::string& suite, const RunConfig& cfg, bool negative_control) {
  const SymplecticSpace sp(cfg.n);
  const Rng root(cfg.seed);
  // one independent stream per suite so that "all" reproduces the single-suite runs
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < kSuites.size(); ++i)
    if (kSuites[i] == suite) stream = 100 * (i + 1);
  const Rng rng = root.split(stream);
  Rng aux = rng.split(99);
  const QuasiState zm = maslov_qs(cfg.limit(), MaslovMethod::auto_select);
  const QuasiState zs = maslov_qs(cfg.limit(), MaslovMethod::spectral);
  const QuasiState lin = linear_qs(random_square(sp.dim(), aux));
  std::vector<VerificationReport> out;

  if (suite == "quasi-linearity") {
    out.push_back(check_quasi_linearity(zm, sp, PairStrategy::common_frame, cfg.trials, {0.0, 3.0}, rng.split(1)));
    out.push_back(check_quasi_linearity(zm, sp, PairStrategy::odd_polynomial, cfg.trials, {0.0, 3.0}, rng.split(2)));
    out.push_back(check_quasi_linearity(lin, sp, PairStrategy::common_frame, cfg.trials, {1e-10, 0.0}, rng.split(3)));
    const SpElement a = nilpotent_jordan_sp(sp);
    const QuasiState disc = discontinuous_qs(a, 1.0);
    out.push_back(check_quasi_linearity(
        disc, "own_generator/n" + std::to_string(cfg.n), [&](Rng& g) { return odd_polynomial_pair(a, g); },
        cfg.trials, {1e-9, 0.0}, rng.split(4)));
    if (negative_control)
      out.push_back(
          check_quasi_linearity(norm_functional(), sp, PairStrategy::common_frame, cfg.trials, {1e-9, 3.0}, rng.split(5)));
  } else if (suite == "ad-invariance") {
    out.push_back(check_ad_invariance(zm, sp, cfg.trials, {0.0, 2.0}, rng.split(1)));
    if (negative_control) out.push_back(check_ad_invariance(lin, sp, cfg.trials, {1e-9, 0.0}, rng.split(2)));
  } else if (suite == "gleason") {
    const auto j = standard_complex_structure(sp);
    auto g = fit_gleason_on_unitary(zs, j, cfg.tol, rng.split(1));
    out.push_back(g);
    if (g.applicable)
      out.push_back(compare_unitary_functional(g.fitted_matrices.at("H"), maslov_unitary_trace, j, cfg.trials, 1e-6,
                                               rng.split(2), "imaginary_trace"));
    out.push_back(fit_gleason_on_unitary(lin, j, 1e-9, rng.split(3)));
  } else if (suite == "rank-one") {
    Rng frame_rng = rng.split(1);
    const GlEmbedding emb = embed_gl(sp, frame_rng);
    out.push_back(fit_rank_one_trace(zs, emb, cfg.trials, cfg.tol, rng.split(2)));
    out.push_back(fit_rank_one_trace(lin, emb, cfg.trials, 1e-9, rng.split(3)));
  } else if (suite == "isotropic") {
    Rng xi_rng = rng.split(1);
    const Vec xi = random_vector(sp.dim(), xi_rng);
    const FGEvaluator fg_m(zs, sp);
    out.push_back(check_isotropic_linearity(fg_m.g_partial(xi), sp, cfg.trials, 1e-8, rng.split(2), "G_maslov"));
    const QuasiState comp = combine({{2.0, zs}, {1.0, lin}}, "2maslov+linear");
    const FGEvaluator fg_c(comp, sp);
    out.push_back(check_isotropic_linearity(fg_c.g_partial(xi), sp, cfg.trials, 1e-8, rng.split(3), "G_composite"));
    if (negative_control)
      out.push_back(check_isotropic_linearity([](const Vec& x) { return x.norm(); }, sp, cfg.trials, 1e-8,
                                              rng.split(4), "euclidean_norm", true));
  } else if (suite == "main-theorem") {
    MainFitOptions opt;
    opt.expected_coefficient = 2.0;
    const QuasiState comp = combine({{2.0, zs}, {1.0, lin}}, "2maslov+linear");
    out.push_back(fit_main_theorem(comp, sp, cfg.tol, rng.split(1), opt));
    opt.expected_coefficient = 1.0;
    out.push_back(fit_main_theorem(zs, sp, cfg.tol, rng.split(2), opt));
  } else {
    throw Error(ErrorKind::parse, "unknown suite '" + suite + "'");
  }
  return out;
}

std::string render_reports(const std::vector<VerificationReport>& reports, const RunConfig& cfg,
                           const std::string& suite, bool negative_control, const std::string& summary) {
  if (cfg.format == "csv") return to_csv(reports);
  TextNode root;
  auto& run = root.add("run");
  run.add("suite", suite);
  run.add("n", std::to_string(cfg.n));
  run.add("seed", std::to_string(cfg.seed));
  run.add("trials", std::to_string(cfg.trials));
  run.add("t_max", format_double(cfg.t_max));
  run.add("dt", format_double(cfg.dt));
  run.add("tol", format_double(cfg.tol));
  run.add("negative_control", negative_control ? "true" : "false");
  for (const auto& r : reports) root.children.push_back(to_tree(r));
  root.add("summary", summary);
  return to_text(root);
}

int cmd_verify(const std::string& suite, bool negative_control, const RunConfig& cfg) {
  std::vector<VerificationReport> reports;
  const std::vector<std::string> suites = suite == "all" ? kSuites : std::vector<std::string>{suite};
  for (const auto& s : suites) {
    auto part = run_suite(s, cfg, negative_control);
    reports.insert(reports.end(), part.begin(), part.end());
  }
  int applicable = 0, passed = 0;
  std::string failed;
  for (const auto& r : reports) {
    if (!r.applicable) continue;
    ++applicable;
    if (r.pass)
      ++passed;
    else
      failed += (failed.empty() ? "" : ", ") + r.check_name;
  }
  const bool all_pass = passed == applicable;
  const std::string summary = all_pass ? "PASS " + std::to_string(passed) + "/" + std::to_string(applicable)
                                       : "FAIL " + std::to_string(passed) + "/" + std::to_string(applicable);
  const std::string ext = cfg.format == "csv" ? ".csv" : ".txt";
  const fs::path path = output_path(cfg.out, "verify-" + suite + "-n" + std::to_string(cfg.n) + "-seed" +
                                                 std::to_string(cfg.seed) + ext);
  write_file_atomic(path, render_reports(reports, cfg, suite, negative_control, summary));
  for (const auto& r : reports)
    if (!r.applicable) std::cout << "skipped " << r.check_name << ": " << (r.notes.empty() ? "" : r.notes[0]) << '\n';
  std::cout << summary << (failed.empty() ? "" : " (" + failed + ")") << '\n';
  std::cout << "report: " << path.string() << '\n';
  return all_pass ? ok : suite_failed;
}

// ---- trace ------------------------------------------------------------------

int cmd_trace(const std::string& file, const RunConfig& cfg) {
  const SpElement b = load_element(file);
  PhaseTrace tr;
  try {
    tr = trace_phase(b.mat(), cfg.limit());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse || e.kind() == ErrorKind::not_in_algebra) throw;
    std::cerr << "error: " << e.what() << '\n';
    return method_precondition;
  }
  std::string csv = "t,theta,theta_over_t\n";
  for (std::size_t i = 1; i < tr.t.size(); ++i)
    csv += format_double(tr.t[i]) + "," + format_double(tr.theta[i]) + "," + format_double(tr.theta[i] / tr.t[i]) +
           "\n";
  if (cfg.out.empty())
    std::cout << csv;
  else
    write_file_atomic(cfg.out, csv);
  return ok;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse:
    case ErrorKind::dimension: return parse_failed;
    case ErrorKind::not_in_algebra: return not_in_sp;
    case ErrorKind::not_semisimple: return not_semisimple;
    default: return method_precondition;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maslov quasi-state and Lie quasi-state tools on sp(2n, R)"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string file, method = "auto", suite = "all";
  bool negative_control = false;

  auto add_limit_flags = [&](CLI::App* sub) {
    sub->add_option("--t-max", cfg.t_max, "Final time of the phase path")->capture_default_str();
    sub->add_option("--dt", cfg.dt, "Initial step of the phase path")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Target accuracy")->capture_default_str();
  };

  auto* eval = app.add_subcommand("eval", "Evaluate zeta_M on a matrix file");
  eval->add_option("matrix", file, "Matrix file ('dim 2n' then rows)")->required();
  eval->add_option("--method", method, "limit | spectral | dim2 | auto")
      ->check(CLI::IsMember({"limit", "spectral", "dim2", "auto"}))
      ->capture_default_str();
  add_limit_flags(eval);

  auto* dec = app.add_subcommand("decompose", "Williamson normal form of a semi-simple matrix");
  dec->add_option("matrix", file, "Matrix file")->required();
  dec->add_option("--out", cfg.out, "Where to write the symplectic frame S");

  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  std::vector<std::string> suite_names = kSuites;
  suite_names.push_back("all");
  ver->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suite_names))->capture_default_str();
  ver->add_option("--n", cfg.n, "Half dimension")->capture_default_str();
  ver->add_option("--seed", cfg.seed, "Seed for all randomness")->capture_default_str();
  ver->add_option("--trials", cfg.trials, "Trials per check")->capture_default_str();
  ver->add_option("--out", cfg.out, "Report path (default: $LQS_OUTPUT_DIR or .)");
  ver->add_option("--format", cfg.format, "structured-text | csv")
      ->check(CLI::IsMember({"structured-text", "csv"}))
      ->capture_default_str();
  ver->add_flag("--negative-control", negative_control, "Include the negative-control functionals");
  add_limit_flags(ver);

  auto* trc = app.add_subcommand("trace", "Write t, theta(t), theta(t)/t as CSV");
  trc->add_option("matrix", file, "Matrix file")->required();
  trc->add_option("--out", cfg.out, "CSV path (default: stdout)");
  add_limit_flags(trc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return parse_failed;
  }

  try {
    cfg.validate();
    if (*eval) return cmd_eval(file, method, cfg);
    if (*dec) return cmd_decompose(file, cfg);
    if (*ver) return cmd_verify(suite, negative_control, cfg);
    if (*trc) return cmd_trace(file, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return parse_failed;
  }
  return parse_failed;
}
