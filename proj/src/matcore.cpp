#include "eiginf/matcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace eiginf {

namespace {

std::string shape_of(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// Unit norm, then rotate the phase so the last non-negligible entry is real
// and positive.
void normalize_right_vector(Eigen::Ref<CVec> v) {
  const double nrm = v.norm();
  if (nrm == 0.0) return;
  v /= nrm;
  const double big = v.cwiseAbs().maxCoeff();
  for (Index i = v.size() - 1; i >= 0; --i) {
    const double a = std::abs(v[i]);
    if (a > 1e-10 * big) {
      v *= std::conj(v[i]) / a;
      v[i] = Complex(a, 0.0);
      return;
    }
  }
}

// Positions sorted by modulus desc, real desc, imag desc. Moduli within a
// relative 1e-12 are treated as tied so that +-rho pairs order by sign.
std::vector<Index> spectral_order(const CVec& values) {
  const Index p = values.size();
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  std::size_t start = 0;
  while (start < idx.size()) {
    const double lead = std::abs(values[idx[start]]);
    std::size_t end = start + 1;
    while (end < idx.size() &&
           lead - std::abs(values[idx[end]]) <= 1e-12 * (1.0 + lead)) {
      ++end;
    }
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Index a, Index b) {
                       if (values[a].real() != values[b].real()) {
                         return values[a].real() > values[b].real();
                       }
                       return values[a].imag() > values[b].imag();
                     });
    start = end;
  }
  return idx;
}

Index conjugate_partner(const Spectrum& s, Index i) {
  Index best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  const Complex target = std::conj(s.eigenvalues[i]);
  for (Index j = 0; j < s.size(); ++j) {
    if (j == i || s.is_real(j)) continue;
    if ((s.eigenvalues[j].imag() > 0) == (s.eigenvalues[i].imag() > 0)) continue;
    const double d = std::abs(s.eigenvalues[j] - target);
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  return best;
}

struct RealBasis {
  Mat right, left, block;
  CVec roots;
};

RealBasis real_basis(const Spectrum& s, const std::vector<Index>& positions) {
  const Index p = s.source.rows();
  const Index dim = static_cast<Index>(positions.size());
  RealBasis out{Mat::Zero(p, dim), Mat::Zero(p, dim), Mat::Zero(dim, dim), CVec(dim)};
  std::vector<bool> done(static_cast<std::size_t>(s.size()), false);
  Index col = 0;
  for (Index i : positions) {
    if (done[static_cast<std::size_t>(i)]) continue;
    done[static_cast<std::size_t>(i)] = true;
    const Complex lambda = s.eigenvalues[i];
    if (s.is_real(i)) {
      out.right.col(col) = s.right.col(i).real();
      out.left.col(col) = s.left.col(i).real();
      out.block(col, col) = lambda.real();
      out.roots[col] = lambda;
      ++col;
      continue;
    }
    const Index partner = conjugate_partner(s, i);
    if (partner < 0 ||
        std::find(positions.begin(), positions.end(), partner) == positions.end()) {
      throw ConjugationError("root selection splits a complex-conjugate pair");
    }
    done[static_cast<std::size_t>(partner)] = true;
    // v = x + iy for a + bi; columns (x, -y) carry the block [[a, -b], [b, a]].
    const double a = lambda.real();
    const double b = lambda.imag();
    out.right.col(col) = s.right.col(i).real();
    out.right.col(col + 1) = -s.right.col(i).imag();
    out.left.col(col) = 2.0 * s.left.col(i).real();
    out.left.col(col + 1) = 2.0 * s.left.col(i).imag();
    out.block(col, col) = a;
    out.block(col, col + 1) = -b;
    out.block(col + 1, col) = b;
    out.block(col + 1, col + 1) = a;
    out.roots[col] = lambda;
    out.roots[col + 1] = std::conj(lambda);
    col += 2;
  }
  return out;
}

}  // namespace

Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvec(const Vec& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw DimensionError("unvec: length " + std::to_string(v.size()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat commutation(Index rows, Index cols) {
  // vec(X) index i + j*rows maps to vec(X') index j + i*cols.
  Mat k = Mat::Zero(rows * cols, rows * cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      k(j + i * cols, i + j * rows) = 1.0;
    }
  }
  return k;
}

void require_finite(const Mat& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InvalidArgumentError(std::string(what) + ": non-finite entry");
  }
}

void require_square(const Mat& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         shape_of(m));
  }
}

Spectrum eig_nonsym(const Mat& m, const SpectralTolerances& tol) {
  require_square(m, "eig_nonsym");
  require_finite(m, "eig_nonsym");
  const Index p = m.rows();

  Spectrum out;
  out.source = m;
  if (p == 0) {
    out.eigenvalues.resize(0);
    out.right.resize(0, 0);
    out.left.resize(0, 0);
    out.condition.resize(0);
    return out;
  }

  Eigen::EigenSolver<Mat> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig_nonsym: QR iteration did not converge");
  }
  const CVec raw_values = solver.eigenvalues();
  const CMat raw_vectors = solver.eigenvectors();

  const auto order = spectral_order(raw_values);
  out.eigenvalues.resize(p);
  out.right.resize(p, p);
  for (Index c = 0; c < p; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    out.eigenvalues[c] = raw_values[src];
    out.right.col(c) = raw_vectors.col(src);
    normalize_right_vector(out.right.col(c));
    if (out.eigenvalues[c].imag() == 0.0) {
      out.right.col(c) = out.right.col(c).real().cast<Complex>();
    }
  }

  out.cluster_size.assign(static_cast<std::size_t>(p), 1);
  for (Index i = 0; i < p; ++i) {
    std::vector<Index> members;
    for (Index j = 0; j < p; ++j) {
      if (std::abs(out.eigenvalues[i] - out.eigenvalues[j]) <=
          tol.cluster_rel * (1.0 + std::abs(out.eigenvalues[i]))) {
        members.push_back(j);
      }
    }
    out.cluster_size[static_cast<std::size_t>(i)] = static_cast<Index>(members.size());
    if (members.size() > 1) {
      CMat block(p, static_cast<Index>(members.size()));
      for (std::size_t c = 0; c < members.size(); ++c) {
        block.col(static_cast<Index>(c)) = out.right.col(members[c]);
      }
      Eigen::JacobiSVD<CMat> svd(block);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 1e-8 * sv(0)) {
        std::ostringstream os;
        os << "eig_nonsym: eigenvalue " << out.eigenvalues[i]
           << " is defective (geometric multiplicity below algebraic "
              "multiplicity)";
        throw DefectiveMatrixError(os.str());
      }
    }
  }

  Eigen::JacobiSVD<CMat> svd(out.right);
  const auto& sv = svd.singularValues();
  out.eigenvector_condition =
      sv(p - 1) > 0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
  if (!(out.eigenvector_condition <= tol.defective_condition)) {
    std::ostringstream os;
    os << "eig_nonsym: eigenvector matrix condition " << out.eigenvector_condition
       << " exceeds " << tol.defective_condition << "; matrix is numerically defective";
    throw DefectiveMatrixError(os.str());
  }

  out.left = out.right.partialPivLu().inverse().transpose();
  out.condition.resize(p);
  for (Index i = 0; i < p; ++i) {
    if (out.eigenvalues[i].imag() == 0.0) {
      out.left.col(i) = out.left.col(i).real().cast<Complex>();
    }
    out.condition[i] = out.left.col(i).norm() * out.right.col(i).norm();
  }
  return out;
}

RootSelector RootSelector::by_index(std::vector<Index> positions) {
  if (positions.empty()) throw InvalidArgumentError("by_index: empty selection");
  RootSelector s;
  s.mode_ = Mode::ByIndex;
  s.positions_ = std::move(positions);
  return s;
}

RootSelector RootSelector::largest_modulus(Index count) {
  if (count < 1) throw InvalidArgumentError("largest_modulus: count must be >= 1");
  RootSelector s;
  s.mode_ = Mode::LargestModulus;
  s.count_ = count;
  return s;
}

RootSelector RootSelector::modulus_above(double threshold) {
  if (!std::isfinite(threshold)) {
    throw InvalidArgumentError("modulus_above: threshold must be finite");
  }
  RootSelector s;
  s.mode_ = Mode::ModulusAbove;
  s.threshold_ = threshold;
  return s;
}

RootSelector RootSelector::nearest_to(std::vector<Complex> targets) {
  if (targets.empty()) throw InvalidArgumentError("nearest_to: no targets");
  RootSelector s;
  s.mode_ = Mode::NearestTo;
  s.targets_ = std::move(targets);
  return s;
}

namespace {

std::string_view trim(std::string_view t) {
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  return t;
}

long long parse_integer(std::string_view t, std::string_view context) {
  t = trim(t);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw InputError("selector '" + std::string(context) + "': bad integer '" +
                     std::string(t) + "'");
  }
  return value;
}

}  // namespace

RootSelector RootSelector::parse(std::string_view text) {
  const std::string_view t = trim(text);
  if (t.rfind("largest:", 0) == 0) {
    const long long k = parse_integer(t.substr(8), t);
    if (k < 1) throw InputError("selector '" + std::string(t) + "': count must be >= 1");
    return largest_modulus(static_cast<Index>(k));
  }
  if (t.rfind("indices:", 0) == 0) {
    std::vector<Index> positions;
    std::string_view rest = t.substr(8);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const long long one_based = parse_integer(rest.substr(0, comma), t);
      if (one_based < 1) {
        throw InputError("selector '" + std::string(t) + "': indices are 1-based");
      }
      positions.push_back(static_cast<Index>(one_based - 1));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (positions.empty()) throw InputError("selector '" + std::string(t) + "': no indices");
    return by_index(std::move(positions));
  }
  if (t.rfind("modulus>", 0) == 0) {
    const std::string num(trim(t.substr(8)));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw InputError("selector '" + std::string(t) + "': bad threshold");
    }
    return modulus_above(value);
  }
  throw InputError("unknown selector '" + std::string(t) +
                   "' (expected largest:k, indices:i,j,... or modulus>x)");
}

std::string RootSelector::describe() const {
  std::ostringstream os;
  switch (mode_) {
    case Mode::LargestModulus:
      os << "largest:" << count_;
      break;
    case Mode::ByIndex:
      os << "indices:";
      for (std::size_t i = 0; i < positions_.size(); ++i) {
        os << (i ? "," : "") << positions_[i] + 1;
      }
      break;
    case Mode::ModulusAbove:
      os << "modulus>" << threshold_;
      break;
    case Mode::NearestTo:
      os << "nearest:" << targets_.size();
      break;
  }
  return os.str();
}

Selection RootSelector::select(const Spectrum& s, const SpectralTolerances& tol) const {
  (void)tol;
  const Index p = s.size();
  std::vector<Index> chosen;
  switch (mode_) {
    case Mode::ByIndex:
      for (Index i : positions_) {
        if (i < 0 || i >= p) {
          throw InvalidArgumentError("root index " + std::to_string(i + 1) +
                                     " out of range for " + std::to_string(p) + " roots");
        }
        chosen.push_back(i);
      }
      break;
    case Mode::LargestModulus:
      if (count_ > p) {
        throw InvalidArgumentError("largest:" + std::to_string(count_) + " exceeds " +
                                   std::to_string(p) + " roots");
      }
      for (Index i = 0; i < count_; ++i) chosen.push_back(i);
      break;
    case Mode::ModulusAbove:
      for (Index i = 0; i < p; ++i) {
        if (std::abs(s.eigenvalues[i]) > threshold_) chosen.push_back(i);
      }
      if (chosen.empty()) {
        throw InvalidArgumentError("no root has modulus above " + std::to_string(threshold_));
      }
      break;
    case Mode::NearestTo: {
      if (static_cast<Index>(targets_.size()) > p) {
        throw InvalidArgumentError("nearest_to: more targets than roots");
      }
      std::vector<bool> used(static_cast<std::size_t>(p), false);
      for (const Complex& target : targets_) {
        Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < p; ++i) {
          if (used[static_cast<std::size_t>(i)]) continue;
          const double d = std::abs(s.eigenvalues[i] - target);
          if (d < best_dist) {
            best_dist = d;
            best = i;
          }
        }
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
      }
      break;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  if (std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end()) {
    throw InvalidArgumentError("root selection lists a root twice");
  }

  Selection out;
  std::vector<Index> additions;
  for (Index i : chosen) {
    if (s.is_real(i)) continue;
    const Index partner = conjugate_partner(s, i);
    if (partner >= 0 && !std::binary_search(chosen.begin(), chosen.end(), partner)) {
      if (!close_conjugates_) {
        std::ostringstream os;
        os << "root selection '" << describe() << "' contains " << s.eigenvalues[i]
           << " but not its conjugate";
        throw ConjugationError(os.str());
      }
      additions.push_back(partner);
    }
  }
  chosen.insert(chosen.end(), additions.begin(), additions.end());
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  out.indices = std::move(chosen);
  out.auto_closed = !additions.empty();
  return out;
}

Mat SpectralSplit::reconstruct() const {
  return R_I * Lambda_I * L_I.transpose() + R_J * Lambda_J * L_J.transpose();
}

SpectralSplit split_spectrum(const Spectrum& s, const Selection& selection,
                             const SpectralTolerances& tol) {
  const Index p = s.size();
  std::vector<Index> in = selection.indices;
  std::sort(in.begin(), in.end());
  std::vector<Index> out_idx;
  for (Index i = 0; i < p; ++i) {
    if (!std::binary_search(in.begin(), in.end(), i)) out_idx.push_back(i);
  }
  if (in.empty()) throw InvalidArgumentError("split_spectrum: empty root selection");

  double gap = std::numeric_limits<double>::infinity();
  for (Index i : in) {
    for (Index j : out_idx) {
      gap = std::min(gap, std::abs(s.eigenvalues[i] - s.eigenvalues[j]));
    }
  }
  if (gap < tol.gap) {
    std::ostringstream os;
    os << "split_spectrum: selected and unselected roots are " << gap
       << " apart, below the gap threshold " << tol.gap
       << " (select whole clusters or relax the gap)";
    throw SpectralGapError(os.str());
  }

  auto basis_i = real_basis(s, in);
  auto basis_j = real_basis(s, out_idx);

  SpectralSplit split;
  split.source = s.source;
  split.R_I = std::move(basis_i.right);
  split.L_I = std::move(basis_i.left);
  split.Lambda_I = std::move(basis_i.block);
  split.roots_I = std::move(basis_i.roots);
  split.R_J = std::move(basis_j.right);
  split.L_J = std::move(basis_j.left);
  split.Lambda_J = std::move(basis_j.block);
  split.roots_J = std::move(basis_j.roots);
  split.selected = std::move(in);
  split.gap = gap;
  return split;
}

SpectralSplit split_spectrum(const Spectrum& s, const RootSelector& sel,
                             const SpectralTolerances& tol) {
  return split_spectrum(s, sel.select(s, tol), tol);
}

SpectralSplit split_matrix(const Mat& m, const RootSelector& sel,
                           const SpectralTolerances& tol) {
  return split_spectrum(eig_nonsym(m, tol), sel, tol);
}

Mat spectral_geninv(const Mat& a, const SpectralTolerances& tol) {
  const Spectrum s = eig_nonsym(a, tol);
  const Index p = s.size();
  if (p == 0) return Mat(0, 0);
  const double largest = s.eigenvalues.cwiseAbs().maxCoeff();
  CVec inv = CVec::Zero(p);
  for (Index i = 0; i < p; ++i) {
    if (std::abs(s.eigenvalues[i]) > tol.zero_root_rel * largest) {
      inv[i] = 1.0 / s.eigenvalues[i];
    }
  }
  return (s.right * inv.asDiagonal() * s.left.transpose()).real();
}

Mat psd_pseudoinverse(const Mat& s, Index rank, double rel_tol) {
  require_square(s, "psd_pseudoinverse");
  require_finite(s, "psd_pseudoinverse");
  const Index p = s.rows();
  if (rank < 0 || rank > p) {
    throw InvalidArgumentError("psd_pseudoinverse: rank " + std::to_string(rank) +
                               " outside [0, " + std::to_string(p) + "]");
  }
  if (rank == 0) return Mat::Zero(p, p);
  const Mat sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("psd_pseudoinverse: symmetric eigensolver failed");
  }
  const Vec& values = solver.eigenvalues();  // ascending
  const double largest = values(p - 1);
  const double smallest_kept = values(p - rank);
  if (!(largest > 0.0) || !(smallest_kept > rel_tol * largest)) {
    std::ostringstream os;
    os << "psd_pseudoinverse: eigenvalue " << rank << " of " << p << " is "
       << smallest_kept << ", not above " << rel_tol << " x largest (" << largest
       << "); the matrix has lower rank than required";
    throw RankError(os.str());
  }
  const Mat kept = solver.eigenvectors().rightCols(rank);
  const Vec inv = values.tail(rank).cwiseInverse();
  return kept * inv.asDiagonal() * kept.transpose();
}

Mat orthocomplement(const Mat& v) {
  require_finite(v, "orthocomplement");
  const Index p = v.rows();
  const Index s = v.cols();
  if (s > p) {
    throw DimensionError("orthocomplement: " + shape_of(v) + " has more columns than rows");
  }
  Eigen::ColPivHouseholderQR<Mat> qr(v);
  qr.setThreshold(1e-10);
  if (qr.rank() < s) {
    throw RankError("orthocomplement: candidate has column rank " +
                    std::to_string(qr.rank()) + " < " + std::to_string(s));
  }
  const Mat q = qr.householderQ() * Mat::Identity(p, p);
  Mat out = q.rightCols(p - s);
  for (Index c = 0; c < out.cols(); ++c) {
    for (Index r = 0; r < p; ++r) {
      if (std::abs(out(r, c)) > 1e-12) {
        if (out(r, c) < 0) out.col(c) *= -1.0;
        break;
      }
    }
  }
  return out;
}

Index numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  return static_cast<Index>((sv.array() > rel_tol * sv(0)).count());
}

double condition_number(const Mat& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  return lo > 0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
}

}  // namespace eiginf
