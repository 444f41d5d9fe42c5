#include "eiginf/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "eiginf/centrality.hpp"
#include "eiginf/inference.hpp"
#include "eiginf/matrix_io.hpp"
#include "eiginf/report_json.hpp"
#include "eiginf/simlab.hpp"

namespace eiginf::cli {

namespace {

struct Common {
  std::string output;
  double gap = SpectralTolerances{}.gap;
};

struct SampleArgs {
  std::string sample;
  std::string mean;
  std::string omega;
  Index n = 0;
  std::string structure = "full";
};

void add_output(CLI::App* cmd, Common& common) {
  cmd->add_option("-o,--output", common.output, "Write the JSON report here (default: stdout)");
}

void add_gap(CLI::App* cmd, Common& common) {
  cmd->add_option("--gap", common.gap, "Minimum distance between selected and other roots")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_sample(CLI::App* cmd, SampleArgs& s) {
  auto* sample = cmd->add_option(
      "--sample", s.sample, "Directory of matrix files or a JSON array of matrices");
  auto* mean = cmd->add_option("--mean", s.mean, "Mean matrix M_hat (with --omega and --n)");
  auto* omega = cmd->add_option("--omega", s.omega, "p^2 x p^2 covariance of vec(M_i)");
  cmd->add_option("--n", s.n, "Sample size for --mean/--omega")->check(CLI::PositiveNumber);
  sample->excludes(mean)->excludes(omega);
  cmd->add_option("--structure", s.structure, "Covariance estimator: full or kronecker")
      ->capture_default_str()
      ->check(CLI::IsMember({"full", "kronecker"}));
}

MatrixSample load_sample(const SampleArgs& s) {
  const auto structure = s.structure == "kronecker" ? CovarianceStructure::KroneckerColumns
                                                    : CovarianceStructure::Full;
  if (!s.sample.empty()) {
    const std::vector<Mat> obs = read_matrix_list(s.sample);
    return estimate_from_sample(obs, structure);
  }
  if (s.mean.empty() || s.omega.empty() || s.n == 0) {
    throw InvalidArgumentError("give --sample, or all of --mean, --omega and --n");
  }
  return sample_from_moments(read_matrix(s.mean), read_matrix(s.omega), s.n);
}

RootSelector parse_selector(const std::string& text) {
  RootSelector sel = RootSelector::parse(text);
  sel.close_conjugates();
  return sel;
}

std::vector<double> levels_for(double alpha) {
  std::vector<double> levels{0.01, 0.05, 0.10, alpha};
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

void emit(const Json& doc, const Common& common, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (common.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.output, std::ios::binary);
  if (!file) throw InputError("cannot write '" + common.output + "'");
  file << text;
}

std::string hint_for(const std::exception& e) {
  if (dynamic_cast<const DefectiveMatrixError*>(&e)) {
    return "the estimated matrix is numerically defective; the tests need a diagonalizable "
           "matrix with simple or well-separated roots";
  }
  if (dynamic_cast<const SpectralGapError*>(&e) || dynamic_cast<const SingularOperatorError*>(&e)) {
    return "selected and unselected roots are too close; select the whole cluster (e.g. "
           "largest:k with a larger k) or lower --gap if the separation is genuine";
  }
  if (dynamic_cast<const ConjugationError*>(&e)) {
    return "select both members of each conjugate pair";
  }
  if (dynamic_cast<const SingularNormalizationError*>(&e)) {
    return "reorder the coordinates (vertices) so the last ones carry weight in the tested "
           "eigenvector";
  }
  if (dynamic_cast<const DominantRootTieError*>(&e)) {
    return "the dominant root is not unique; perturb weights to break the symmetry";
  }
  if (dynamic_cast<const NonpositiveVarianceError*>(&e)) {
    return "the covariance estimate is degenerate for this coefficient; check that the sample "
           "varies";
  }
  if (dynamic_cast<const InputError*>(&e)) {
    return "matrices are CSV (one row per line) or JSON {\"rows\",\"cols\",\"data\"}";
  }
  return {};
}

int decompose(const std::string& input, const std::string& select, const Common& common,
              std::ostream& out) {
  const Mat m = read_matrix(input);
  SpectralTolerances tol;
  tol.gap = common.gap;
  const Spectrum s = eig_nonsym(m, tol);
  const RootSelector sel = parse_selector(select);
  const Selection selection = sel.select(s, tol);
  const SpectralSplit split = split_spectrum(s, selection, tol);
  Json doc = decomposition_to_json(s, split, sel);
  if (selection.auto_closed) doc["notices"] = {"root selection was closed under conjugation"};
  emit(doc, common, out);
  return kExitOk;
}

int check_symmetry(const std::string& input, const Common& common, std::ostream& out) {
  const Mat m = read_matrix(input);
  Json doc{{"schema_version", kSchemaVersion}, {"command", "check-symmetry"}};
  try {
    const SymmetryCheck check = quasi_symmetry_check(m);
    doc["symmetrizable"] = check.symmetrizable;
    doc["verdict"] = check.symmetrizable ? "symmetrizable" : "not symmetrizable";
    if (check.certificate) {
      const Mat& g = *check.certificate;
      doc["certificate"] = matrix_to_json(g);
      const Mat gm = g * m;
      doc["asymmetry"] = (gm - gm.transpose()).cwiseAbs().maxCoeff();
    } else {
      doc["reason"] = "complex roots";
    }
  } catch (const DefectiveMatrixError&) {
    doc["symmetrizable"] = false;
    doc["verdict"] = "not symmetrizable";
    doc["reason"] = "defective matrix";
  }
  emit(doc, common, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inference on eigenvectors and eigenspaces of nonsymmetric matrices", "eiginf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "eiginf 0.1.0");

  Common common;
  SampleArgs sample_args;
  std::string input, select = "largest:1", upsilon, upsilon_perp, coef, graphs, graph, score;
  std::string config, format = "json";
  double alpha = 0.05, d0 = 0.0;
  bool assert_null = false;
  std::optional<std::uint64_t> seed;
  std::optional<Index> reps;
  std::optional<unsigned> threads;

  auto add_select = [&](CLI::App* cmd) {
    cmd->add_option("--select", select, "Roots L_I: largest:k, indices:1,3 or modulus>x")
        ->capture_default_str();
  };
  auto add_alpha = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Test level")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* dec = app.add_subcommand("decompose", "Eigendecomposition and spectral split of a matrix");
  dec->add_option("--input", input, "Matrix file (.csv or .json)")->required();
  add_select(dec);
  add_gap(dec, common);
  add_output(dec, common);

  auto* wald = app.add_subcommand("wald", "Wald test that a subspace is (in) an eigenspace");
  add_sample(wald, sample_args);
  auto* up = wald->add_option("--upsilon", upsilon, "Candidate subspace v (p x s)");
  auto* upp = wald->add_option("--upsilon-perp", upsilon_perp, "Candidate v_perp (p x c), tested directly");
  up->excludes(upp);
  add_select(wald);
  add_alpha(wald);
  add_gap(wald, common);
  wald->add_flag("--assert-null", assert_null, "Exit with code 2 when H0 is rejected");
  add_output(wald, common);

  auto* tt = app.add_subcommand("ttest", "t-test on one coefficient of the [D; I]-normalized eigenspace");
  add_sample(tt, sample_args);
  tt->add_option("--coef", coef, "Coefficient i,j of D (1-based)")->required();
  tt->add_option("--d0", d0, "Null value")->capture_default_str();
  add_select(tt);
  add_alpha(tt);
  add_gap(tt, common);
  tt->add_flag("--assert-null", assert_null, "Exit with code 2 when H0 is rejected");
  add_output(tt, common);

  auto* cen = app.add_subcommand("centrality", "Eigenvector centrality of a directed graph");
  auto* g_one = cen->add_option("--graph", graph, "Edge list (from,to,weight CSV or JSON)");
  auto* g_many = cen->add_option("--graphs", graphs, "Directory of edge lists or JSON array of graphs (one per period)");
  g_one->excludes(g_many);
  cen->add_option("--score", score, "Candidate score vector to test for confidence-set membership");
  add_alpha(cen);
  cen->add_flag("--assert-null", assert_null, "Exit with code 2 when --score is outside the set");
  add_output(cen, common);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo size/power study");
  sim->add_option("--config", config, "SimConfig JSON")->required();
  sim->add_option("--seed", seed, "Override the config seed");
  sim->add_option("--reps", reps, "Override the number of replications");
  sim->add_option("--threads", threads, "Worker threads (0: all cores)");
  sim->add_option("--format", format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  add_output(sim, common);

  auto* sym = app.add_subcommand("check-symmetry", "Is the matrix similar to a symmetric one via Gamma > 0?");
  sym->add_option("--input", input, "Matrix file (.csv or .json)")->required();
  add_output(sym, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (dec->parsed()) return decompose(input, select, common, out);
    if (sym->parsed()) return check_symmetry(input, common, out);

    TestOptions options;
    options.levels = levels_for(alpha);
    options.tol.gap = common.gap;

    if (wald->parsed()) {
      if (upsilon.empty() == upsilon_perp.empty()) {
        throw InvalidArgumentError("give exactly one of --upsilon or --upsilon-perp");
      }
      const MatrixSample sample = load_sample(sample_args);
      Hypothesis hyp;
      hyp.selector = parse_selector(select);
      if (!upsilon.empty()) {
        hyp.candidate = read_matrix(upsilon);
      } else {
        hyp.candidate = read_matrix(upsilon_perp);
        hyp.form = CandidateForm::Orthocomplement;
      }
      const TestReport report = wald_test(sample, hyp, options);
      Json doc = report_to_json(report);
      doc["command"] = "wald";
      doc["n"] = sample.n;
      doc["alpha"] = alpha;
      doc["reject"] = report.p_value < alpha;
      emit(doc, common, out);
      return assert_null && report.p_value < alpha ? kExitRejected : kExitOk;
    }

    if (tt->parsed()) {
      Index i = 0, j = 0;
      char comma = 0;
      std::istringstream in(coef);
      if (!(in >> i >> comma >> j) || comma != ',' || !in.eof() || i < 1 || j < 1) {
        throw InvalidArgumentError("--coef must be 'i,j' with 1-based indices");
      }
      const MatrixSample sample = load_sample(sample_args);
      const NormalizedEstimate est = estimate_D(sample, parse_selector(select), options.tol);
      const TestReport report = t_test(est, i - 1, j - 1, d0, options);
      Json doc = report_to_json(report);
      doc["command"] = "ttest";
      doc["coefficient"] = {i, j};
      doc["d0"] = d0;
      doc["estimate"] = estimate_to_json(est);
      doc["alpha"] = alpha;
      doc["reject"] = report.p_value < alpha;
      emit(doc, common, out);
      return assert_null && report.p_value < alpha ? kExitRejected : kExitOk;
    }

    if (cen->parsed()) {
      Json doc{{"schema_version", kSchemaVersion}, {"command", "centrality"}, {"alpha", alpha}};
      bool rejected = false;
      if (!graph.empty()) {
        if (!score.empty()) throw InvalidArgumentError("--score needs --graphs (repeated snapshots)");
        const DirectedGraph g = read_graph(graph);
        doc["vertices"] = g.vertex_labels();
        doc["adjacency"] = matrix_to_json(adjacency(g));
        doc["centrality"] = centrality_to_json(katz_scores(adjacency(g)), g.vertex_labels());
      } else if (!graphs.empty()) {
        std::vector<std::string> labels;
        const std::vector<Mat> series = adjacency_series(read_graph_series(graphs), &labels);
        const MatrixSample sample = estimate_from_sample(series);
        const CentralityResult c = katz_scores(sample.m_hat);
        doc["vertices"] = labels;
        doc["n"] = sample.n;
        doc["mean_adjacency"] = matrix_to_json(sample.m_hat);
        doc["centrality"] = centrality_to_json(c, labels);
        if (!c.used_modulus) {
          doc["ratio_intervals"] = intervals_to_json(score_intervals(sample, alpha), labels, alpha);
        }
        if (!score.empty()) {
          const Mat s0 = read_matrix(score);
          if (s0.cols() != 1 && s0.rows() != 1) throw DimensionError("--score must be a vector");
          const Vec v = s0.cols() == 1 ? Vec(s0.col(0)) : Vec(s0.row(0).transpose());
          const MembershipResult mr = score_in_confidence_set(sample, v, alpha, options);
          doc["membership"] = membership_to_json(mr);
          rejected = !mr.inside;
        }
      } else {
        throw InvalidArgumentError("give --graph or --graphs");
      }
      emit(doc, common, out);
      return assert_null && rejected ? kExitRejected : kExitOk;
    }

    if (sim->parsed()) {
      Json j;
      try {
        j = Json::parse(read_text_file(config));
      } catch (const Json::parse_error& e) {
        throw InputError(config + ": " + e.what());
      }
      SimConfig cfg = sim_config_from_json(j, config);
      if (seed) cfg.seed = *seed;
      if (reps) cfg.reps = *reps;
      if (threads) cfg.threads = *threads;
      validate(cfg);
      const SimResult result = run_size_power(cfg);
      if (format == "csv") {
        const std::string text = sim_tables_csv(result);
        if (common.output.empty()) {
          out << text;
        } else {
          std::ofstream file(common.output, std::ios::binary);
          if (!file) throw InputError("cannot write '" + common.output + "'");
          file << text;
        }
        return kExitOk;
      }
      Json doc = sim_result_to_json(result);
      doc["schema_version"] = kSchemaVersion;
      doc["command"] = "simulate";
      doc["seed"] = cfg.seed;
      doc["noise"] = cfg.noise == NoiseModel::Gaussian ? "gaussian" : "student_t8";
      emit(doc, common, out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    const std::string hint = hint_for(e);
    if (!hint.empty()) err << "hint: " << hint << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace eiginf::cli
