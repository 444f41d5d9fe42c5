#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "eiginf/centrality.hpp"
#include "eiginf/cli.hpp"
#include "eiginf/inference.hpp"
#include "eiginf/report_json.hpp"
#include "eiginf/simlab.hpp"

namespace py = pybind11;
using namespace eiginf;

namespace {

// Reports travel as JSON text; the Python side decodes them with json.loads.
std::string dump(const Json& j) { return j.dump(); }

MatrixSample make_sample(const std::optional<std::vector<Mat>>& observations,
                         const std::optional<Mat>& mean, const std::optional<Mat>& omega,
                         std::optional<Index> n, const std::string& structure) {
  const CovarianceStructure cs = structure == "kronecker" ? CovarianceStructure::KroneckerColumns
                                                          : CovarianceStructure::Full;
  if (structure != "full" && structure != "kronecker") {
    throw InvalidArgumentError("structure must be 'full' or 'kronecker'");
  }
  if (observations) {
    if (mean || omega || n) {
      throw InvalidArgumentError("pass either observations or mean/omega/n, not both");
    }
    return estimate_from_sample(*observations, cs);
  }
  if (!mean || !omega || !n) {
    throw InvalidArgumentError("mean, omega and n are all required without observations");
  }
  return sample_from_moments(*mean, *omega, *n);
}

}  // namespace

PYBIND11_MODULE(_eiginf, m) {
  m.doc() = "Spectral projectors and eigenspace inference for nonsymmetric matrices";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DefectiveMatrixError>(m, "DefectiveMatrixError", base.ptr());
  py::register_exception<SpectralGapError>(m, "SpectralGapError", base.ptr());
  py::register_exception<ConjugationError>(m, "ConjugationError", base.ptr());
  py::register_exception<RankError>(m, "RankError", base.ptr());
  py::register_exception<DominantRootTieError>(m, "DominantRootTieError", base.ptr());

  m.def(
      "eig",
      [](const Mat& a) {
        const Spectrum s = eig_nonsym(a);
        return py::make_tuple(s.eigenvalues, s.right, s.left);
      },
      py::arg("m"), "Ordered eigenvalues with biorthogonal right and left vectors.");

  m.def(
      "split",
      [](const Mat& a, const std::string& select) {
        const SpectralSplit s =
            split_matrix(a, RootSelector::parse(select).close_conjugates());
        py::dict out;
        out["R_I"] = s.R_I;
        out["L_I"] = s.L_I;
        out["Lambda_I"] = s.Lambda_I;
        out["R_J"] = s.R_J;
        out["L_J"] = s.L_J;
        out["Lambda_J"] = s.Lambda_J;
        out["P_I"] = s.projector_I();
        out["P_J"] = s.projector_J();
        out["gap"] = s.gap;
        return out;
      },
      py::arg("m"), py::arg("select") = "largest:1");

  m.def("decompose_json",
        [](const Mat& a, const std::string& select) {
          const RootSelector sel = RootSelector::parse(select).close_conjugates();
          const Spectrum s = eig_nonsym(a);
          return dump(decomposition_to_json(s, split_spectrum(s, sel), sel));
        },
        py::arg("m"), py::arg("select") = "largest:1");

  m.def(
      "wald_json",
      [](const Mat& candidate, const std::optional<std::vector<Mat>>& observations,
         const std::optional<Mat>& mean, const std::optional<Mat>& omega,
         std::optional<Index> n, const std::string& select, bool orthocomplement_form,
         const std::string& structure) {
        Hypothesis h;
        h.candidate = candidate;
        h.selector = RootSelector::parse(select).close_conjugates();
        if (orthocomplement_form) h.form = CandidateForm::Orthocomplement;
        return dump(report_to_json(wald_test(make_sample(observations, mean, omega, n, structure), h)));
      },
      py::arg("candidate"), py::kw_only(), py::arg("observations") = py::none(),
      py::arg("mean") = py::none(), py::arg("omega") = py::none(), py::arg("n") = py::none(),
      py::arg("select") = "largest:1", py::arg("orthocomplement") = false,
      py::arg("structure") = "full");

  m.def(
      "ttest_json",
      [](Index row, Index col, std::optional<double> d0,
         const std::optional<std::vector<Mat>>& observations, const std::optional<Mat>& mean,
         const std::optional<Mat>& omega, std::optional<Index> n, const std::string& select) {
        const NormalizedEstimate est =
            estimate_D(make_sample(observations, mean, omega, n, "full"),
                       RootSelector::parse(select).close_conjugates());
        Json j = estimate_to_json(est);
        j["test"] = report_to_json(t_test(est, row, col, d0.value_or(0.0)));
        return dump(j);
      },
      py::arg("row"), py::arg("col"), py::arg("d0") = py::none(), py::kw_only(),
      py::arg("observations") = py::none(), py::arg("mean") = py::none(),
      py::arg("omega") = py::none(), py::arg("n") = py::none(), py::arg("select") = "largest:1");

  m.def(
      "katz",
      [](const Mat& a) {
        const CentralityResult r = katz_scores(a);
        py::dict out;
        out["scores"] = r.scores;
        out["dominant_root"] = r.dominant_root;
        out["used_modulus"] = r.used_modulus;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("adjacency"));

  m.def(
      "quasi_symmetry",
      [](const Mat& a) {
        const SymmetryCheck c = quasi_symmetry_check(a);
        return py::make_tuple(c.symmetrizable, c.certificate);
      },
      py::arg("m"), "(symmetrizable, Gamma or None) with Gamma M symmetric.");

  m.def(
      "simulate_json",
      [](const std::string& config, std::optional<std::uint64_t> seed, std::optional<Index> reps,
         int threads) {
        SimConfig cfg = sim_config_from_json(Json::parse(config), "<python>");
        if (seed) cfg.seed = *seed;
        if (reps) cfg.reps = *reps;
        cfg.threads = threads;
        SimResult r;
        {
          py::gil_scoped_release release;
          r = run_size_power(cfg);
        }
        return dump(sim_result_to_json(r, false));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("reps") = py::none(),
      py::arg("threads") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
