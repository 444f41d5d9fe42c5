#pragma once

// Dense real linear algebra kernel: nonsymmetric eigendecomposition with
// biorthogonal left/right eigenvectors, conjugate-closed spectral splits in
// real bases, generalized inverses and orthocomplements.
//
// Matrices are Eigen column-major, so vec() is a plain reinterpretation of
// the storage.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eiginf/errors.hpp"

namespace eiginf {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct SpectralTolerances {
  // |l_i - l_j| <= cluster_rel * (1 + |l_i|) means "the same root".
  double cluster_rel = 1e-8;
  // Minimum distance between selected and unselected roots.
  double gap = 1e-6;
  // |l| <= zero_root_rel * max|l| counts as a zero root in spectral_geninv.
  double zero_root_rel = 1e-10;
  // Eigenvector matrices with a larger 2-norm condition number are treated
  // as numerically defective.
  double defective_condition = 1e12;
};

Vec vec(const Mat& m);
Mat unvec(const Vec& v, Index rows, Index cols);
Mat kron(const Mat& a, const Mat& b);
// Commutation matrix K with vec(X') = K vec(X) for X of shape rows x cols.
Mat commutation(Index rows, Index cols);

void require_finite(const Mat& m, std::string_view what);
void require_square(const Mat& m, std::string_view what);

struct Spectrum {
  Mat source;
  // Ordered by modulus desc, then real part desc, then imaginary part desc.
  CVec eigenvalues;
  // Column i of right/left belongs to eigenvalues[i]; left.transpose() * right = I.
  CMat right;
  CMat left;
  // Number of roots in the cluster of each root (1 for simple roots).
  std::vector<Index> cluster_size;
  // Eigenvalue condition numbers |l_i| |r_i|.
  Vec condition;
  // 2-norm condition number of the right-vector matrix.
  double eigenvector_condition = 1.0;

  Index size() const { return eigenvalues.size(); }
  bool is_real(Index i) const { return eigenvalues[i].imag() == 0.0; }
};

// Right vectors have unit Euclidean norm and their last non-negligible entry
// real and positive; left vectors absorb the remaining scale.
Spectrum eig_nonsym(const Mat& m, const SpectralTolerances& tol = {});

struct Selection {
  std::vector<Index> indices;  // ascending positions in Spectrum order
  bool auto_closed = false;    // conjugates were pulled in
};

class RootSelector {
 public:
  enum class Mode { ByIndex, LargestModulus, ModulusAbove, NearestTo };

  static RootSelector by_index(std::vector<Index> positions);
  static RootSelector largest_modulus(Index count);
  static RootSelector modulus_above(double threshold);
  static RootSelector nearest_to(std::vector<Complex> targets);

  // Grammar: "largest:k", "indices:1,3" (1-based), "modulus>0.9".
  static RootSelector parse(std::string_view text);

  // When set, selecting one root of a conjugate pair pulls in the other
  // instead of raising ConjugationError.
  RootSelector& close_conjugates(bool enable = true) {
    close_conjugates_ = enable;
    return *this;
  }
  bool closes_conjugates() const { return close_conjugates_; }

  Selection select(const Spectrum& s, const SpectralTolerances& tol = {}) const;

  Mode mode() const { return mode_; }
  std::string describe() const;

 private:
  Mode mode_ = Mode::LargestModulus;
  std::vector<Index> positions_;
  Index count_ = 1;
  double threshold_ = 0.0;
  std::vector<Complex> targets_;
  bool close_conjugates_ = false;
};

// Real bases for the I/J division of the spectrum. Conjugate pairs
// a +- bi appear as 2x2 blocks [[a, -b], [b, a]].
struct SpectralSplit {
  Mat source;
  Mat R_I, L_I, Lambda_I;
  Mat R_J, L_J, Lambda_J;
  CVec roots_I, roots_J;
  std::vector<Index> selected;
  double gap = 0.0;  // min distance between roots_I and roots_J (inf if J empty)

  Index p() const { return source.rows(); }
  Index k() const { return R_I.cols(); }
  Index m() const { return R_J.cols(); }
  Mat projector_I() const { return R_I * L_I.transpose(); }
  Mat projector_J() const { return R_J * L_J.transpose(); }
  Mat reconstruct() const;
};

SpectralSplit split_spectrum(const Spectrum& s, const RootSelector& sel,
                             const SpectralTolerances& tol = {});
SpectralSplit split_spectrum(const Spectrum& s, const Selection& selection,
                             const SpectralTolerances& tol = {});
SpectralSplit split_matrix(const Mat& m, const RootSelector& sel,
                           const SpectralTolerances& tol = {});

// sum over nonzero roots of lambda^{-1} P_lambda.
Mat spectral_geninv(const Mat& a, const SpectralTolerances& tol = {});

// Symmetric pseudo-inverse keeping exactly `rank` leading eigenvalues.
Mat psd_pseudoinverse(const Mat& s, Index rank, double rel_tol = 1e-12);

// p x (p - s) basis of the orthogonal complement of range(v); columns are
// orthonormal with their first non-negligible entry positive.
Mat orthocomplement(const Mat& v);

Index numerical_rank(const Mat& a, double rel_tol = 1e-8);
double condition_number(const Mat& a);

}  // namespace eiginf
