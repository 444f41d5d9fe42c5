#pragma once

// Perturbation calculus for the eigenprojection map
//   psi(M) = v_perp' P_I(M),  P_I = R_I L_I'.
// Shapes: k = |L_I|, m = p - k, c = cols(v_perp).

#include <string>

#include "eiginf/matcore.hpp"

namespace eiginf {

// S(Q) = Q Lambda_I - Lambda_J Q for Q of shape m x k.
Mat sylvester_apply(const Mat& q, const Mat& lambda_i, const Mat& lambda_j);

// Dense Kronecker form of S, factorized once:
//   (Lambda_I' (x) I_m - I_k (x) Lambda_J) vec Q = vec C.
class SylvesterOperator {
 public:
  SylvesterOperator(const Mat& lambda_i, const Mat& lambda_j, double gap = 1e-6);

  Mat solve(const Mat& c) const;
  // K^{-1} * rhs for a block of vectorized right-hand sides (mk x r).
  Mat solve_vectorized(const Mat& rhs) const;

  const Mat& kronecker_matrix() const { return kron_; }
  double min_gap() const { return min_gap_; }
  double condition() const;
  Index rows() const { return m_; }
  Index cols() const { return k_; }

 private:
  Index k_ = 0;
  Index m_ = 0;
  Mat kron_;
  Eigen::PartialPivLU<Mat> lu_;
  double min_gap_ = 0.0;
};

Mat sylvester_solve(const Mat& c, const Mat& lambda_i, const Mat& lambda_j,
                    double gap = 1e-6);

// Projections of E = M_hat - M onto the split.
struct DeltaBlocks {
  Mat delta_I;   // L_I' E R_I, k x k
  Mat delta_IJ;  // L_J' E R_I, m x k
  Mat delta_J;   // L_J' E R_J, m x m
};

DeltaBlocks delta_blocks(const Mat& m_hat, const Mat& m, const SpectralSplit& split);

// v_perp' P_I(M). Roots are chosen on M's own spectrum by `sel`.
Mat psi(const Mat& m, const Mat& v_perp, const RootSelector& sel,
        const SpectralTolerances& tol = {});

// v_perp' R_I R_{I,2}^{-1}: the normalized-basis variant, R_{I,2} being the
// bottom k x k block of R_I. Invariant to the choice of basis for eig_I.
Mat psi_normalized(const Mat& m, const Mat& v_perp, const RootSelector& sel,
                   const SpectralTolerances& tol = {});

// Selector that picks, on a perturbed matrix, the roots nearest to the
// reference split's I-roots.
RootSelector matching_selector(const SpectralSplit& reference);

// Inverse of the bottom k x k block of R_I; throws SingularNormalizationError.
Mat bottom_block_inverse(const Mat& r_i, double* condition = nullptr);

// First Frechet derivative v_perp' R_J S^{-1}(Delta_IJ) L_I'. Exact when
// v_perp' R_I = 0 (the maintained hypothesis).
Mat psi_dot(const Mat& e, const SpectralSplit& split, const Mat& v_perp,
            double gap = 1e-6);

// Second Frechet derivative under v_perp' R_I = 0. With V = S^{-1}(Delta_IJ),
//   W = S^{-1}(Delta_J V - V Delta_I - V A_IJ V),   A_IJ = L_I' M R_J,
//   Z solving Lambda_I Z - Z Lambda_J = -L_I' E R_J,
// returns 2 v_perp' R_J (W L_I' - V Z L_J').
Mat psi_ddot(const Mat& e, const SpectralSplit& split, const Mat& v_perp,
             double gap = 1e-6);

// Coupling block L_I' M R_J of the split; zero for a biorthogonal eigenbasis.
Mat coupling_block(const SpectralSplit& split);

enum class JacobianVariant { Projection, Normalized };

struct Jacobian {
  Mat matrix;  // rows: vec of the differentiated c x p (or c x k) map; cols: vec E
  JacobianVariant variant = JacobianVariant::Projection;
  std::string label() const {
    return variant == JacobianVariant::Projection ? "d vec(v_perp' P_I) / d vec M"
                                                  : "d vec(v_perp' R_I R_I2^-1) / d vec M";
  }
};

// B_W = (L_I (x) v_perp' R_J) K^{-1} (R_I' (x) L_J'), (c p) x p^2.
Jacobian jacobian_bw(const SpectralSplit& split, const Mat& v_perp, double gap = 1e-6);

// B_A = (R_{I,2}^{-T} (x) v_perp' R_J) K^{-1} (R_I' (x) L_J'), (c k) x p^2.
Jacobian jacobian_ba(const SpectralSplit& split, const Mat& v_perp, double gap = 1e-6);

// Central-difference Jacobian of psi (Projection) or psi_normalized
// (Normalized) over all p^2 unit perturbations. Perturbed spectra are matched
// to M's selected roots by nearest eigenvalue.
Jacobian fd_jacobian(const Mat& m, const Mat& v_perp, const RootSelector& sel, double eps,
                     JacobianVariant variant, const SpectralTolerances& tol = {});

}  // namespace eiginf
