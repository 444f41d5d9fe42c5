#include "eiginf/report_json.hpp"

#include <cmath>

namespace eiginf {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json one_based(const std::vector<Index>& idx) {
  Json out = Json::array();
  for (Index i : idx) out.push_back(i + 1);
  return out;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Json complex_vector_to_json(const CVec& v) {
  Json re = Json::array(), im = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return Json{{"real", re}, {"imag", im}};
}

Json complex_matrix_to_json(const CMat& m) {
  return Json{{"real", matrix_to_json(m.real())}, {"imag", matrix_to_json(m.imag())}};
}

Json spectrum_to_json(const Spectrum& s) {
  Json j;
  j["eigenvalues"] = complex_vector_to_json(s.eigenvalues);
  j["right"] = complex_matrix_to_json(s.right);
  j["left"] = complex_matrix_to_json(s.left);
  j["cluster_size"] = s.cluster_size;
  Json cond = Json::array();
  for (Index i = 0; i < s.condition.size(); ++i) cond.push_back(number(s.condition[i]));
  j["eigenvalue_condition"] = cond;
  j["eigenvector_condition"] = number(s.eigenvector_condition);
  return j;
}

Json decomposition_to_json(const Spectrum& s, const SpectralSplit& split,
                           const RootSelector& sel) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "decompose";
  j["p"] = split.p();
  j["input"] = matrix_to_json(split.source);
  j["spectrum"] = spectrum_to_json(s);
  j["selector"] = sel.describe();
  j["selected"] = one_based(split.selected);
  j["roots_I"] = complex_vector_to_json(split.roots_I);
  j["roots_J"] = complex_vector_to_json(split.roots_J);
  j["gap"] = number(split.gap);
  j["split"] = {{"R_I", matrix_to_json(split.R_I)},
                {"L_I", matrix_to_json(split.L_I)},
                {"Lambda_I", matrix_to_json(split.Lambda_I)},
                {"R_J", matrix_to_json(split.R_J)},
                {"L_J", matrix_to_json(split.L_J)},
                {"Lambda_J", matrix_to_json(split.Lambda_J)}};
  const Mat p_i = split.projector_I();
  const Mat p_j = split.projector_J();
  j["P_I"] = matrix_to_json(p_i);
  j["P_J"] = matrix_to_json(p_j);
  const Index p = split.p();
  const Mat& m = split.source;
  j["checks"] = {
      {"biorthogonality", (s.left.transpose() * s.right - CMat::Identity(p, p)).cwiseAbs().maxCoeff()},
      {"idempotence", max_abs(p_i * p_i - p_i)},
      {"complementarity", max_abs(p_i + p_j - Mat::Identity(p, p))},
      {"cross_product", max_abs(p_i * p_j)},
      {"commutation", max_abs(m * p_i - p_i * m)},
      {"reconstruction", max_abs(split.reconstruct() - m)}};
  return j;
}

Mat reconstruct_from_decomposition(const Json& doc) {
  const Json& sp = doc.at("split");
  auto get = [&](const char* key) { return matrix_from_json(sp.at(key), key); };
  Mat out = get("R_I") * get("Lambda_I") * get("L_I").transpose();
  const Mat r_j = get("R_J");
  if (r_j.cols() > 0) out += r_j * get("Lambda_J") * get("L_J").transpose();
  return out;
}

Json report_to_json(const TestReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["test"] = r.test;
  j["statistic"] = number(r.statistic);
  j["df"] = r.df;
  j["reference"] = r.reference.kind == Distribution::Kind::ChiSquare
                       ? "chi2(" + std::to_string(r.reference.df) + ")"
                       : std::string("N(0,1)");
  j["p_value"] = number(r.p_value);
  Json decisions = Json::array();
  for (const auto& [level, reject] : r.reject_at) {
    decisions.push_back({{"alpha", level}, {"reject", reject}});
  }
  j["decisions"] = decisions;
  const auto& d = r.diagnostics;
  j["diagnostics"] = {{"k", d.k},
                      {"c", d.c},
                      {"omega_rank", d.omega_rank},
                      {"numerical_rank", d.numerical_rank},
                      {"eigen_gap", number(d.eigen_gap)},
                      {"sylvester_condition", number(d.sylvester_condition)},
                      {"eigenvector_condition", number(d.eigenvector_condition)},
                      {"normalization_condition", number(d.normalization_condition)},
                      {"restriction_vanishes", d.restriction_vanishes},
                      {"route", d.route},
                      {"notices", d.notices}};
  return j;
}

Json estimate_to_json(const NormalizedEstimate& e) {
  Mat se(e.d_hat.rows(), e.d_hat.cols());
  for (Index i = 0; i < se.rows(); ++i) {
    for (Index c = 0; c < se.cols(); ++c) se(i, c) = std::sqrt(std::max(e.variance(i, c), 0.0));
  }
  return Json{{"D_hat", matrix_to_json(e.d_hat)},
              {"std_error", matrix_to_json(se)},
              {"omega_D", matrix_to_json(e.omega_d)},
              {"n", e.n},
              {"k", e.k},
              {"roots", complex_vector_to_json(e.roots)},
              {"normalization_condition", number(e.normalization_condition)}};
}

Json centrality_to_json(const CentralityResult& r, const std::vector<std::string>& labels) {
  Json scores = Json::array();
  for (Index i = 0; i < r.scores.size(); ++i) {
    Json entry{{"score", r.scores[i]}};
    if (static_cast<std::size_t>(i) < labels.size()) {
      entry["vertex"] = labels[static_cast<std::size_t>(i)];
    }
    scores.push_back(entry);
  }
  return Json{{"scores", scores},
              {"dominant_root", r.dominant_root},
              {"root", {{"real", r.root.real()}, {"imag", r.root.imag()}}},
              {"used_modulus", r.used_modulus},
              {"warnings", r.warnings}};
}

Json membership_to_json(const MembershipResult& r) {
  return Json{{"inside", r.inside}, {"threshold", r.threshold}, {"report", report_to_json(r.report)}};
}

Json intervals_to_json(const std::vector<ScoreInterval>& cis,
                       const std::vector<std::string>& labels, double alpha) {
  Json out = Json::array();
  for (const auto& ci : cis) {
    Json entry{{"index", ci.index + 1},
               {"lo", ci.lo},
               {"estimate", ci.estimate},
               {"hi", ci.hi},
               {"std_error", ci.std_error},
               {"level", 1.0 - alpha}};
    if (static_cast<std::size_t>(ci.index) < labels.size() && !labels.empty()) {
      entry["ratio"] = labels[static_cast<std::size_t>(ci.index)] + "/" + labels.back();
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace eiginf
