#include "eiginf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eiginf/perturb.hpp"

namespace eiginf {

namespace {

void fill_levels(TestReport& report, const std::vector<double>& levels) {
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw InvalidArgumentError("test level must lie in (0, 1)");
    }
    report.reject_at[level] = report.p_value < level;
  }
}

struct WaldInputs {
  Mat m_hat;
  Mat omega;
  Mat v_perp;
  Spectrum spectrum;
  Selection selection;
  std::string route;
};

TestReport wald_core(const WaldInputs& in, Index n, const TestOptions& options) {
  const SpectralSplit split = split_spectrum(in.spectrum, in.selection, options.tol);
  const Index k = split.k();
  const Index m = split.m();
  const Index c = in.v_perp.cols();
  if (c == 0) {
    throw InvalidArgumentError("wald_test: the candidate spans the whole space; nothing to test");
  }
  if (c > m) {
    std::ostringstream os;
    os << "wald_test: v_perp has " << c << " columns but the complementary eigenspace has "
       << "dimension " << m << "; the restriction covariance cannot reach rank k*c";
    throw InvalidArgumentError(os.str());
  }

  TestReport report;
  report.test = "wald";
  report.df = k * c;
  report.reference = Distribution::chi2(report.df);
  auto& diag = report.diagnostics;
  diag.k = k;
  diag.c = c;
  diag.omega_rank = report.df;
  diag.eigen_gap = split.gap;
  diag.eigenvector_condition = in.spectrum.eigenvector_condition;
  diag.route = in.route;
  if (in.selection.auto_closed) {
    diag.notices.push_back("root selection was closed under conjugation");
  }

  const Mat projector = split.projector_I();
  const Mat restriction = in.v_perp.transpose() * projector;
  const SylvesterOperator op(split.Lambda_I, split.Lambda_J, options.tol.gap);
  diag.sylvester_condition = op.condition();

  const double scale = in.v_perp.norm() * projector.norm();
  if (restriction.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    diag.restriction_vanishes = true;
    report.statistic = 0.0;
    report.p_value = 1.0;
    fill_levels(report, options.levels);
    return report;
  }

  const Jacobian b = jacobian_bw(split, in.v_perp, options.tol.gap);
  const Mat omega_w = b.matrix * in.omega * b.matrix.transpose();
  diag.numerical_rank = numerical_rank(omega_w);
  const Mat pinv = psd_pseudoinverse(omega_w, report.df, options.pinv_rel_tol);
  const Vec r = vec(restriction);
  report.statistic = static_cast<double>(n) * r.dot(pinv * r);
  report.p_value = tail_probability(report.statistic, report.reference);
  fill_levels(report, options.levels);
  return report;
}

}  // namespace

MatrixSample estimate_from_vectorized(const Mat& columns, Index p,
                                      CovarianceStructure structure) {
  const Index n = columns.cols();
  if (columns.rows() != p * p) {
    throw DimensionError("estimate_from_vectorized: expected p^2 rows");
  }
  if (n < 2) throw InvalidArgumentError("estimate_from_sample: need at least 2 observations");
  require_finite(columns, "estimate_from_sample");

  MatrixSample out;
  out.n = n;
  out.structure = structure;
  const Vec mean = columns.rowwise().mean();
  out.m_hat = unvec(mean, p, p);
  const Mat centered = columns.colwise() - mean;
  if (structure == CovarianceStructure::Full) {
    out.omega_hat = centered * centered.transpose() / static_cast<double>(n - 1);
  } else {
    Mat omega_m = Mat::Zero(p, p);
    for (Index col = 0; col < p; ++col) {
      const auto block = centered.middleRows(col * p, p);
      omega_m += block * block.transpose();
    }
    omega_m /= static_cast<double>(p * (n - 1));
    out.omega_hat = kron(Mat::Identity(p, p), omega_m);
  }
  return out;
}

MatrixSample estimate_from_sample(std::span<const Mat> observations,
                                  CovarianceStructure structure) {
  const Index n = static_cast<Index>(observations.size());
  if (n < 2) throw InvalidArgumentError("estimate_from_sample: need at least 2 observations");
  const Index p = observations.front().rows();
  Mat columns(p * p, n);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Mat& obs = observations[i];
    if (obs.rows() != p || obs.cols() != p) {
      std::ostringstream os;
      os << "estimate_from_sample: observation " << i + 1 << " is " << obs.rows() << "x"
         << obs.cols() << ", expected " << p << "x" << p;
      throw DimensionError(os.str());
    }
    columns.col(static_cast<Index>(i)) = vec(obs);
  }
  MatrixSample out = estimate_from_vectorized(columns, p, structure);
  out.observations.assign(observations.begin(), observations.end());
  return out;
}

MatrixSample sample_from_moments(Mat m_hat, Mat omega_hat, Index n) {
  require_square(m_hat, "sample_from_moments");
  const Index p = m_hat.rows();
  if (omega_hat.rows() != p * p || omega_hat.cols() != p * p) {
    throw DimensionError("sample_from_moments: Omega must be p^2 x p^2");
  }
  if (n < 2) throw InvalidArgumentError("sample_from_moments: n must be >= 2");
  MatrixSample out;
  out.n = n;
  out.m_hat = std::move(m_hat);
  out.omega_hat = std::move(omega_hat);
  return out;
}

HypothesisCase classify(const Hypothesis& hyp, Index k) {
  if (hyp.form == CandidateForm::Orthocomplement) return HypothesisCase::Containing;
  return numerical_rank(hyp.candidate, 1e-10) <= k ? HypothesisCase::Contained
                                                   : HypothesisCase::Containing;
}

TestReport wald_test(const MatrixSample& sample, const Hypothesis& hyp,
                     const TestOptions& options) {
  const Index p = sample.dim();
  if (hyp.candidate.rows() != p) {
    throw DimensionError("wald_test: candidate has " + std::to_string(hyp.candidate.rows()) +
                         " rows, expected " + std::to_string(p));
  }
  require_finite(hyp.candidate, "wald_test candidate");

  WaldInputs in;
  in.spectrum = eig_nonsym(sample.m_hat, options.tol);
  in.selection = hyp.selector.select(in.spectrum, options.tol);
  in.m_hat = sample.m_hat;
  in.omega = sample.omega_hat;
  const Index k = static_cast<Index>(in.selection.indices.size());

  if (hyp.form == CandidateForm::Orthocomplement) {
    in.v_perp = hyp.candidate;
    in.route = "direct";
    return wald_core(in, sample.n, options);
  }

  const Index s = hyp.candidate.cols();
  if (numerical_rank(hyp.candidate, 1e-10) < s) {
    throw RankError("wald_test: candidate does not have full column rank");
  }
  if (s >= k) {
    in.v_perp = orthocomplement(hyp.candidate);
    in.route = "orthocomplement";
    return wald_core(in, sample.n, options);
  }

  // v in eig_I(M) <=> P_J(M) v = 0 <=> v' P_J(M') = 0: the same restriction on
  // the transposed matrix with the complementary roots selected.
  std::vector<Complex> complement;
  for (Index i = 0; i < in.spectrum.size(); ++i) {
    if (!std::binary_search(in.selection.indices.begin(), in.selection.indices.end(), i)) {
      complement.push_back(in.spectrum.eigenvalues[i]);
    }
  }
  const Mat commute = commutation(p, p);
  WaldInputs t;
  t.m_hat = sample.m_hat.transpose();
  t.omega = commute * sample.omega_hat * commute.transpose();
  t.spectrum = eig_nonsym(t.m_hat, options.tol);
  t.selection = RootSelector::nearest_to(std::move(complement)).select(t.spectrum, options.tol);
  t.v_perp = hyp.candidate;
  t.route = "transposed";
  TestReport report = wald_core(t, sample.n, options);
  if (in.selection.auto_closed) {
    report.diagnostics.notices.push_back("root selection was closed under conjugation");
  }
  return report;
}

double NormalizedEstimate::variance(Index i, Index j) const {
  const Index idx = coefficient_index(i, j);
  return omega_d(idx, idx) / static_cast<double>(n);
}

NormalizedEstimate estimate_D(const MatrixSample& sample, const RootSelector& sel,
                              const SpectralTolerances& tol) {
  const SpectralSplit split = split_matrix(sample.m_hat, sel, tol);
  const Index p = split.p();
  const Index k = split.k();
  if (k >= p) {
    throw InvalidArgumentError("estimate_D: the selected eigenspace is the whole space");
  }
  NormalizedEstimate out;
  const Mat r2_inv = bottom_block_inverse(split.R_I, &out.normalization_condition);
  out.d_hat = split.R_I.topRows(p - k) * r2_inv;
  out.n = sample.n;
  out.k = k;
  out.roots = split.roots_I;

  Mat v_perp(p, p - k);
  v_perp.topRows(p - k) = Mat::Identity(p - k, p - k);
  v_perp.bottomRows(k) = -out.d_hat.transpose();
  const Jacobian b = jacobian_ba(split, v_perp, tol.gap);
  out.omega_d = b.matrix * sample.omega_hat * b.matrix.transpose();
  return out;
}

TestReport t_test(const NormalizedEstimate& est, Index i, Index j, double d0,
                  const TestOptions& options) {
  if (i < 0 || j < 0 || i >= est.d_hat.rows() || j >= est.d_hat.cols()) {
    std::ostringstream os;
    os << "t_test: coefficient (" << i << "," << j << ") outside D of shape "
       << est.d_hat.rows() << "x" << est.d_hat.cols();
    throw InvalidArgumentError(os.str());
  }
  if (!std::isfinite(d0)) throw InvalidArgumentError("t_test: d0 must be finite");
  const double var = est.variance(i, j);
  if (!(var > 0.0) || !std::isfinite(var)) {
    std::ostringstream os;
    os << "t_test: estimated variance of coefficient (" << i << "," << j << ") is " << var
       << "; the covariance estimate is degenerate";
    throw NonpositiveVarianceError(os.str());
  }
  TestReport report;
  report.test = "t";
  report.df = 1;
  report.reference = Distribution::std_normal();
  report.statistic = (est.d_hat(i, j) - d0) / std::sqrt(var);
  report.p_value = std::erfc(std::abs(report.statistic) / std::sqrt(2.0));
  report.diagnostics.k = est.k;
  report.diagnostics.c = 1;
  report.diagnostics.omega_rank = 1;
  report.diagnostics.numerical_rank = 1;
  report.diagnostics.normalization_condition = est.normalization_condition;
  report.diagnostics.route = "coefficient";
  fill_levels(report, options.levels);
  return report;
}

Mat normalized_coefficients(const Mat& basis) {
  const Index k = basis.cols();
  const Index p = basis.rows();
  if (k >= p) throw DimensionError("normalized_coefficients: basis must have fewer columns than rows");
  return basis.topRows(p - k) * bottom_block_inverse(basis);
}

SymmetryCheck quasi_symmetry_check(const Mat& m, const SpectralTolerances& tol) {
  const Spectrum s = eig_nonsym(m, tol);
  SymmetryCheck out;
  for (Index i = 0; i < s.size(); ++i) {
    if (!s.is_real(i)) return out;
  }
  const Mat l = s.left.real();
  out.symmetrizable = true;
  out.certificate = l * l.transpose();
  return out;
}

}  // namespace eiginf
