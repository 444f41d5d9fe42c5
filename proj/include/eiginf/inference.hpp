#pragma once

// Statistical layer: sample moments, the Wald test of v_perp' P_I = 0, the
// [D; I_k]-normalized eigenspace estimator with its delta-method covariance,
// coefficient t-tests and the quasi-symmetry diagnostic.
//
// Covariance convention: sqrt(n) vec(M_hat - M) => N(0, Omega), so
// Omega_hat estimates the per-observation covariance of vec(M_i).

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eiginf/distributions.hpp"
#include "eiginf/matcore.hpp"

namespace eiginf {

enum class CovarianceStructure {
  Full,             // unrestricted p^2 x p^2 sample covariance
  KroneckerColumns  // I_p (x) Omega_M with Omega_M pooled over columns
};

struct MatrixSample {
  std::vector<Mat> observations;  // may be empty when built from moments
  Index n = 0;
  Mat m_hat;
  Mat omega_hat;
  CovarianceStructure structure = CovarianceStructure::Full;

  Index dim() const { return m_hat.rows(); }
};

MatrixSample estimate_from_sample(std::span<const Mat> observations,
                                  CovarianceStructure structure = CovarianceStructure::Full);

// Same estimator from a p^2 x n matrix whose columns are vec(M_i).
MatrixSample estimate_from_vectorized(const Mat& columns, Index p,
                                      CovarianceStructure structure = CovarianceStructure::Full);

// A sample summarized by its moments only (no observations kept).
MatrixSample sample_from_moments(Mat m_hat, Mat omega_hat, Index n);

enum class CandidateForm {
  Subspace,        // candidate is v, p x s
  Orthocomplement  // candidate is v_perp, p x c, tested directly
};

enum class HypothesisCase {
  Contained,  // rank v <= |L_I|: v lies in eig_I
  Containing  // rank v >  |L_I|: eig_I lies in span v
};

struct Hypothesis {
  Mat candidate;
  CandidateForm form = CandidateForm::Subspace;
  RootSelector selector = RootSelector::largest_modulus(1);
};

HypothesisCase classify(const Hypothesis& hyp, Index k);

struct TestDiagnostics {
  Index k = 0;            // |L_I| on the tested side
  Index c = 0;            // restriction rows (columns of v_perp)
  Index omega_rank = 0;   // rank used for the pseudo-inverse
  Index numerical_rank = 0;
  double eigen_gap = 0.0;
  double sylvester_condition = 0.0;
  double eigenvector_condition = 0.0;
  double normalization_condition = 0.0;  // 0 when not applicable
  bool restriction_vanishes = false;
  std::string route;  // "orthocomplement", "direct", "transposed", "coefficient"
  std::vector<std::string> notices;
};

struct TestReport {
  std::string test;  // "wald" or "t"
  double statistic = 0.0;
  Index df = 0;
  Distribution reference;
  double p_value = 1.0;
  std::map<double, bool> reject_at;  // level -> p_value < level
  TestDiagnostics diagnostics;
};

struct TestOptions {
  std::vector<double> levels{0.01, 0.05, 0.10};
  SpectralTolerances tol{};
  double pinv_rel_tol = 1e-12;
};

TestReport wald_test(const MatrixSample& sample, const Hypothesis& hyp,
                     const TestOptions& options = {});

struct NormalizedEstimate {
  Mat d_hat;    // (p - k) x k, [D_hat; I_k] spans eig_I(M_hat)
  Mat omega_d;  // covariance of sqrt(n) vec(D_hat), column-major vec order
  Index n = 0;
  Index k = 0;
  double normalization_condition = 0.0;
  CVec roots;

  Index coefficient_index(Index i, Index j) const { return i + j * d_hat.rows(); }
  double variance(Index i, Index j) const;  // Omega_D entry / n
};

NormalizedEstimate estimate_D(const MatrixSample& sample, const RootSelector& sel,
                              const SpectralTolerances& tol = {});

// t = (d_ij - d0) / sigma_ij against N(0, 1), two-sided.
TestReport t_test(const NormalizedEstimate& est, Index i, Index j, double d0,
                  const TestOptions& options = {});

// D from an explicit basis v = [v1; v2] (v2 the bottom k x k block): D = v1 v2^{-1}.
Mat normalized_coefficients(const Mat& basis);

struct SymmetryCheck {
  bool symmetrizable = false;
  std::optional<Mat> certificate;  // Gamma > 0 with Gamma M symmetric
};

// Symmetrizable iff diagonalizable with a real spectrum; then Gamma = L L'.
SymmetryCheck quasi_symmetry_check(const Mat& m, const SpectralTolerances& tol = {});

}  // namespace eiginf
