#include "eiginf/perturb.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace eiginf {

namespace {

CVec block_roots(const Mat& block) {
  if (block.rows() == 0) return CVec(0);
  Eigen::EigenSolver<Mat> solver(block, false);
  return solver.eigenvalues();
}

void require_v_perp(const Mat& v_perp, Index p, std::string_view what) {
  if (v_perp.rows() != p) {
    std::ostringstream os;
    os << what << ": v_perp has " << v_perp.rows() << " rows, expected " << p;
    throw DimensionError(os.str());
  }
}

}  // namespace

Mat sylvester_apply(const Mat& q, const Mat& lambda_i, const Mat& lambda_j) {
  require_square(lambda_i, "sylvester_apply (Lambda_I)");
  require_square(lambda_j, "sylvester_apply (Lambda_J)");
  if (q.rows() != lambda_j.rows() || q.cols() != lambda_i.rows()) {
    throw DimensionError("sylvester_apply: Q must be rows(Lambda_J) x rows(Lambda_I)");
  }
  return q * lambda_i - lambda_j * q;
}

SylvesterOperator::SylvesterOperator(const Mat& lambda_i, const Mat& lambda_j, double gap) {
  require_square(lambda_i, "SylvesterOperator (Lambda_I)");
  require_square(lambda_j, "SylvesterOperator (Lambda_J)");
  k_ = lambda_i.rows();
  m_ = lambda_j.rows();

  min_gap_ = std::numeric_limits<double>::infinity();
  const CVec roots_i = block_roots(lambda_i);
  const CVec roots_j = block_roots(lambda_j);
  for (Index a = 0; a < roots_i.size(); ++a) {
    for (Index b = 0; b < roots_j.size(); ++b) {
      min_gap_ = std::min(min_gap_, std::abs(roots_i[a] - roots_j[b]));
    }
  }
  if (min_gap_ <= gap) {
    std::ostringstream os;
    os << "Sylvester operator is singular: Lambda_I and Lambda_J roots are " << min_gap_
       << " apart (threshold " << gap << ")";
    throw SingularOperatorError(os.str());
  }

  kron_ = kron(lambda_i.transpose(), Mat::Identity(m_, m_)) -
          kron(Mat::Identity(k_, k_), lambda_j);
  if (kron_.size() > 0) lu_.compute(kron_);
}

Mat SylvesterOperator::solve(const Mat& c) const {
  if (c.rows() != m_ || c.cols() != k_) {
    throw DimensionError("sylvester_solve: right-hand side must be rows(Lambda_J) x rows(Lambda_I)");
  }
  if (c.size() == 0) return Mat::Zero(m_, k_);
  const Vec x = lu_.solve(vec(c));
  return unvec(x, m_, k_);
}

Mat SylvesterOperator::solve_vectorized(const Mat& rhs) const {
  if (rhs.rows() != m_ * k_) {
    throw DimensionError("SylvesterOperator::solve_vectorized: row mismatch");
  }
  if (rhs.rows() == 0) return Mat::Zero(0, rhs.cols());
  return lu_.solve(rhs);
}

double SylvesterOperator::condition() const { return condition_number(kron_); }

Mat sylvester_solve(const Mat& c, const Mat& lambda_i, const Mat& lambda_j, double gap) {
  return SylvesterOperator(lambda_i, lambda_j, gap).solve(c);
}

DeltaBlocks delta_blocks(const Mat& m_hat, const Mat& m, const SpectralSplit& split) {
  if (m_hat.rows() != split.p() || m_hat.cols() != split.p() || m.rows() != split.p() ||
      m.cols() != split.p()) {
    throw DimensionError("delta_blocks: matrices must be p x p for the split");
  }
  const Mat e = m_hat - m;
  return DeltaBlocks{split.L_I.transpose() * e * split.R_I,
                     split.L_J.transpose() * e * split.R_I,
                     split.L_J.transpose() * e * split.R_J};
}

Mat psi(const Mat& m, const Mat& v_perp, const RootSelector& sel,
        const SpectralTolerances& tol) {
  const SpectralSplit split = split_matrix(m, sel, tol);
  require_v_perp(v_perp, split.p(), "psi");
  return v_perp.transpose() * split.projector_I();
}

Mat bottom_block_inverse(const Mat& r_i, double* condition) {
  const Index k = r_i.cols();
  const Mat r2 = r_i.bottomRows(k);
  const double cond = condition_number(r2);
  if (condition) *condition = cond;
  if (!(cond < 1e10)) {
    std::ostringstream os;
    os << "bottom " << k << "x" << k << " block of R_I is singular (condition " << cond
       << "); the [D; I] normalization does not exist for this coordinate order, "
          "reorder coordinates so the tested eigenvector has nonzero trailing entries";
    throw SingularNormalizationError(os.str(), cond);
  }
  return r2.partialPivLu().inverse();
}

Mat psi_normalized(const Mat& m, const Mat& v_perp, const RootSelector& sel,
                   const SpectralTolerances& tol) {
  const SpectralSplit split = split_matrix(m, sel, tol);
  require_v_perp(v_perp, split.p(), "psi_normalized");
  return v_perp.transpose() * split.R_I * bottom_block_inverse(split.R_I);
}

RootSelector matching_selector(const SpectralSplit& reference) {
  std::vector<Complex> targets(reference.roots_I.data(),
                               reference.roots_I.data() + reference.roots_I.size());
  return RootSelector::nearest_to(std::move(targets));
}

Mat psi_dot(const Mat& e, const SpectralSplit& split, const Mat& v_perp, double gap) {
  require_v_perp(v_perp, split.p(), "psi_dot");
  if (e.rows() != split.p() || e.cols() != split.p()) {
    throw DimensionError("psi_dot: perturbation must be p x p");
  }
  if (split.m() == 0) return Mat::Zero(v_perp.cols(), split.p());
  const SylvesterOperator op(split.Lambda_I, split.Lambda_J, gap);
  const Mat v = op.solve(split.L_J.transpose() * e * split.R_I);
  return v_perp.transpose() * split.R_J * v * split.L_I.transpose();
}

Mat coupling_block(const SpectralSplit& split) {
  return split.L_I.transpose() * split.source * split.R_J;
}

Mat psi_ddot(const Mat& e, const SpectralSplit& split, const Mat& v_perp, double gap) {
  require_v_perp(v_perp, split.p(), "psi_ddot");
  if (e.rows() != split.p() || e.cols() != split.p()) {
    throw DimensionError("psi_ddot: perturbation must be p x p");
  }
  if (split.m() == 0) return Mat::Zero(v_perp.cols(), split.p());

  const Mat delta_i = split.L_I.transpose() * e * split.R_I;
  const Mat delta_ij = split.L_J.transpose() * e * split.R_I;
  const Mat delta_j = split.L_J.transpose() * e * split.R_J;
  const Mat a_ij = coupling_block(split);

  const SylvesterOperator op(split.Lambda_I, split.Lambda_J, gap);
  const Mat v = op.solve(delta_ij);
  const Mat w = op.solve(delta_j * v - v * delta_i - v * a_ij * v);

  // Left-basis response: Lambda_I Z - Z Lambda_J = -L_I' E R_J, solved through
  // the transposed operator Z' Lambda_I' - Lambda_J' Z' = -(L_I' E R_J)'.
  const SylvesterOperator op_t(split.Lambda_I.transpose(), split.Lambda_J.transpose(), gap);
  const Mat gamma = split.L_I.transpose() * e * split.R_J;
  const Mat z = op_t.solve(-gamma.transpose()).transpose();

  return 2.0 * v_perp.transpose() * split.R_J *
         (w * split.L_I.transpose() - v * z * split.L_J.transpose());
}

Jacobian jacobian_bw(const SpectralSplit& split, const Mat& v_perp, double gap) {
  require_v_perp(v_perp, split.p(), "jacobian_bw");
  const Index p = split.p();
  Jacobian out;
  out.variant = JacobianVariant::Projection;
  if (split.m() == 0) {
    out.matrix = Mat::Zero(v_perp.cols() * p, p * p);
    return out;
  }
  const SylvesterOperator op(split.Lambda_I, split.Lambda_J, gap);
  const Mat left = kron(split.L_I, v_perp.transpose() * split.R_J);
  const Mat right = kron(split.R_I.transpose(), split.L_J.transpose());
  out.matrix = left * op.solve_vectorized(right);
  return out;
}

Jacobian jacobian_ba(const SpectralSplit& split, const Mat& v_perp, double gap) {
  require_v_perp(v_perp, split.p(), "jacobian_ba");
  const Index p = split.p();
  const Mat r2_inv = bottom_block_inverse(split.R_I);
  Jacobian out;
  out.variant = JacobianVariant::Normalized;
  if (split.m() == 0) {
    out.matrix = Mat::Zero(v_perp.cols() * split.k(), p * p);
    return out;
  }
  const SylvesterOperator op(split.Lambda_I, split.Lambda_J, gap);
  const Mat left = kron(r2_inv.transpose(), v_perp.transpose() * split.R_J);
  const Mat right = kron(split.R_I.transpose(), split.L_J.transpose());
  out.matrix = left * op.solve_vectorized(right);
  return out;
}

Jacobian fd_jacobian(const Mat& m, const Mat& v_perp, const RootSelector& sel, double eps,
                     JacobianVariant variant, const SpectralTolerances& tol) {
  if (!(eps >= 1e-8 && eps <= 1e-3)) {
    throw InvalidArgumentError("fd_jacobian: eps must lie in [1e-8, 1e-3]");
  }
  const SpectralSplit reference = split_matrix(m, sel, tol);
  require_v_perp(v_perp, reference.p(), "fd_jacobian");
  const RootSelector matched = matching_selector(reference);
  const Index p = reference.p();

  auto evaluate = [&](const Mat& x) {
    return variant == JacobianVariant::Projection ? psi(x, v_perp, matched, tol)
                                                  : psi_normalized(x, v_perp, matched, tol);
  };

  const Index rows = variant == JacobianVariant::Projection ? v_perp.cols() * p
                                                            : v_perp.cols() * reference.k();
  Jacobian out;
  out.variant = variant;
  out.matrix.resize(rows, p * p);
  Mat unit = Mat::Zero(p, p);
  for (Index col = 0; col < p * p; ++col) {
    unit(col % p, col / p) = 1.0;
    const Mat plus = evaluate(m + eps * unit);
    const Mat minus = evaluate(m - eps * unit);
    out.matrix.col(col) = vec(plus - minus) / (2.0 * eps);
    unit(col % p, col / p) = 0.0;
  }
  return out;
}

}  // namespace eiginf
