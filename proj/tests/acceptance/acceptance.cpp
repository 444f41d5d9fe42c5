// Acceptance suite: one PASS/FAIL line per criterion.
//
//   eiginf_acceptance              run every criterion
//   eiginf_acceptance --criterion 5

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eiginf/centrality.hpp"
#include "eiginf/cli.hpp"
#include "eiginf/inference.hpp"
#include "eiginf/perturb.hpp"
#include "eiginf/simlab.hpp"
#include "../support.hpp"

using namespace eiginf;
using eiginf::fixtures::max_abs;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// p = 4 design: real dominant root 1.0, a pair 0.5 +- 0.4i and a real 0.3,
// in a fixed non-orthogonal basis.
Mat design_matrix() {
  Mat lambda = Mat::Zero(4, 4);
  lambda(0, 0) = 1.0;
  lambda(1, 1) = lambda(2, 2) = 0.5;
  lambda(1, 2) = -0.4;
  lambda(2, 1) = 0.4;
  lambda(3, 3) = 0.3;
  Mat v(4, 4);
  v << 1.0, 0.3, -0.2, 0.1,
       0.2, 1.0, 0.4, -0.3,
       -0.1, 0.5, 1.0, 0.2,
       0.6, -0.2, 0.1, 1.0;
  return v * lambda * v.inverse();
}

Mat ar_covariance(Index p, double rho, double scale) {
  Mat out(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) out(i, j) = scale * std::pow(rho, std::abs(double(i - j)));
  return out;
}

SimConfig size_config() {
  SimConfig cfg;
  cfg.m_true = design_matrix();
  cfg.omega_m = ar_covariance(4, 0.5, 1.0);
  cfg.n_grid = {2000};
  cfg.reps = 5000;
  cfg.alpha_grid = {0.01, 0.05, 0.10};
  cfg.seed = 20240917;
  cfg.hypothesis.selector = RootSelector::largest_modulus(1);
  cfg.hypothesis.candidate = split_matrix(cfg.m_true, cfg.hypothesis.selector).R_I;
  cfg.t_coefficient = CoefficientTest{0, 0, std::nullopt};
  return cfg;
}

const SimResult& size_result() {
  static const SimResult r = run_size_power(size_config());
  return r;
}

Verdict criterion1() {
  Stopwatch clock;
  Mat m(2, 2);
  m << 0.8, 0.5, 0.0, 0.4;
  const Spectrum s = eig_nonsym(m);
  const SpectralSplit split = split_spectrum(s, RootSelector::largest_modulus(1));
  const Mat l = s.left.real();
  Mat p1(2, 2), p2(2, 2);
  p1 << 1, 1.25, 0, 0;
  p2 << 0, -1.25, 0, 1;
  double err = 0;
  err = std::max(err, std::abs(s.eigenvalues[0] - Complex(0.8)));
  err = std::max(err, std::abs(s.eigenvalues[1] - Complex(0.4)));
  err = std::max(err, max_abs(l.col(0) - (Vec(2) << 1, 1.25).finished()));
  err = std::max(err, max_abs(l.col(1) - (Vec(2) << 0, 1.6).finished()));
  err = std::max(err, max_abs(split.projector_I() - p1));
  err = std::max(err, max_abs(split.projector_J() - p2));
  const double t = clock.seconds();
  return {err < 1e-3 && t < 1.0,
          fmt("max deviation from worked-example values %.2e (tol 1e-3), %.3fs", err, t)};
}

Verdict criterion2() {
  Stopwatch clock;
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index p = 2 + trial % 11;
    const Mat m = fixtures::random_diagonalizable(rng, p);
    const Spectrum s = eig_nonsym(m);
    const Index k = 1 + trial % (p - 1);
    const SpectralSplit split =
        split_spectrum(s, RootSelector::largest_modulus(k).close_conjugates());
    const Mat pi = split.projector_I(), pj = split.projector_J();
    const Mat id = Mat::Identity(p, p);
    worst = std::max({worst, max_abs(pi * pi - pi), max_abs(pj * pj - pj), max_abs(pi * pj),
                      max_abs(pi + pj - id), max_abs(m * pi - pi * m),
                      (s.left.transpose() * s.right - CMat::Identity(p, p)).cwiseAbs().maxCoeff(),
                      max_abs(split.reconstruct() - m)});
  }
  const double t = clock.seconds();
  return {worst <= 1e-8 && t < 30.0,
          fmt("1000 matrices p<=12, worst identity residual %.2e (tol 1e-8), %.2fs", worst, t)};
}

Verdict criterion3() {
  Stopwatch clock;
  std::mt19937_64 rng(3);
  double worst_w = 0, worst_a = 0;
  int drawn = 0;
  // Instances whose normalized form is well posed: with |D| large the O(eps^2)
  // truncation of the central difference alone exceeds the absolute tolerance.
  const double max_d = 5.0;
  for (int done = 0; done < 100; ++drawn) {
    const Index p = 2 + done % 7;
    const Mat m = fixtures::random_diagonalizable(rng, p);
    const Index k_req = 1 + done % std::max<Index>(1, p / 2);
    const RootSelector sel = RootSelector::largest_modulus(k_req).close_conjugates();
    const SpectralSplit split = split_matrix(m, sel);
    if (split.m() == 0) continue;
    const Index k = split.k();
    const Mat d = split.R_I.topRows(p - k) * split.R_I.bottomRows(k).inverse();
    if (d.norm() > max_d) continue;
    ++done;

    const Mat v_perp = orthocomplement(split.R_I);
    const Mat bw = jacobian_bw(split, v_perp).matrix;
    const Mat fw = fd_jacobian(m, v_perp, sel, 1e-5, JacobianVariant::Projection).matrix;
    worst_w = std::max(worst_w, max_abs(bw - fw));

    Mat v_norm(p, p - k);
    v_norm << Mat::Identity(p - k, p - k), -d.transpose();
    const Mat ba = jacobian_ba(split, v_norm).matrix;
    const Mat fa = fd_jacobian(m, v_norm, sel, 1e-5, JacobianVariant::Normalized).matrix;
    worst_a = std::max(worst_a, max_abs(ba - fa));
  }
  const double t = clock.seconds();
  return {worst_w <= 1e-5 && worst_a <= 1e-5 && t < 60.0,
          fmt("100 instances p<=8 (|D|_F<=%.0f, %d drawn): max |B_W - FD| %.2e, "
              "max |B_A - FD| %.2e (tol 1e-5), %.2fs",
              max_d, drawn, worst_w, worst_a, t)};
}

Verdict criterion4() {
  Stopwatch clock;
  std::mt19937_64 rng(4);
  double worst1 = 0, worst2 = 0;
  const std::vector<double> grid = log_grid(1e-4, 1e-2, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 3 + trial % 4;
    const Mat m = fixtures::random_diagonalizable(rng, p);
    const RootSelector sel = RootSelector::largest_modulus(1 + trial % 2).close_conjugates();
    const SpectralSplit split = split_matrix(m, sel);
    if (split.m() == 0) continue;
    const Mat v_perp = orthocomplement(split.R_I);
    const Mat e = fixtures::gaussian(rng, p, p);
    const RemainderSlopes r = remainder_order(m, e, sel, v_perp, grid);
    worst1 = std::max(worst1, std::abs(r.first_order - 2.0));
    worst2 = std::max(worst2, std::abs(r.second_order - 3.0));
    if (std::isnan(r.first_order) || std::isnan(r.second_order)) worst1 = worst2 = INFINITY;
  }
  const double t = clock.seconds();
  return {worst1 <= 0.15 && worst2 <= 0.2 && t < 30.0,
          fmt("20 instances: max |slope1 - 2| %.3f (tol 0.15), max |slope2 - 3| %.3f (tol 0.2), %.2fs",
              worst1, worst2, t)};
}

Index alpha_col(const SimResult& r, double alpha) {
  for (std::size_t i = 0; i < r.alpha_grid.size(); ++i)
    if (r.alpha_grid[i] == alpha) return static_cast<Index>(i);
  return -1;
}

Verdict criterion5() {
  Stopwatch clock;
  const SimResult& r = size_result();
  const double size = r.wald_rejection(0, alpha_col(r, 0.05));
  const double ks = r.wald_ks[0];
  const double fail = static_cast<double>(r.wald_failures[0]) / r.reps;
  const double t = clock.seconds();
  return {size >= 0.035 && size <= 0.065 && ks <= 0.03 && r.wald_df == 3 && fail < 1e-3 && t < 300,
          fmt("n=2000 reps=5000: size@0.05 %.4f in [0.035,0.065], KS to chi2(%ld) %.4f (<=0.03), "
              "failures %.2f%%, %.1fs",
              size, static_cast<long>(r.wald_df), ks, 100 * fail, t)};
}

Verdict criterion6() {
  Stopwatch clock;
  const SimResult& r = size_result();
  const double size = r.t_rejection(0, alpha_col(r, 0.05));
  const double ks = r.t_ks[0];
  const double fail = static_cast<double>(r.t_failures[0]) / r.reps;
  const double t = clock.seconds();
  return {size >= 0.035 && size <= 0.065 && ks <= 0.03 && fail < 1e-3 && t < 300,
          fmt("standardized D coefficient: KS to N(0,1) %.4f (<=0.03), size@0.05 %.4f, "
              "failures %.2f%%, %.1fs",
              ks, size, 100 * fail, t)};
}

Verdict criterion7() {
  Stopwatch clock;
  SimConfig cfg = size_config();
  cfg.reps = 1000;
  cfg.seed = 7;
  cfg.t_coefficient.reset();
  const Vec s = cfg.hypothesis.candidate.col(0).normalized();
  // Unit direction orthogonal to s, then rotate s towards it by 0.2 rad.
  const Vec u = orthocomplement(s).col(0);
  cfg.hypothesis.candidate = std::cos(0.2) * s + std::sin(0.2) * u;
  const SimResult r = run_size_power(cfg);
  const double power = r.wald_rejection(0, alpha_col(r, 0.05));
  const double t = clock.seconds();
  return {power >= 0.9, fmt("0.2 rad misaligned candidate, n=2000, reps=1000: rejection@0.05 "
                            "%.4f (>=0.9), %.1fs",
                            power, t)};
}

Verdict criterion8() {
  Stopwatch clock;
  std::mt19937_64 rng(8);
  int matched = 0, total = 0;
  std::string first_miss;
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 2 + trial % 7;
    const Index k_req = std::min<Index>(1 + trial % 2, p - 1);
    SpectralSplit split;
    do {
      split = split_matrix(fixtures::random_diagonalizable(rng, p),
                           RootSelector::largest_modulus(k_req).close_conjugates());
    } while (split.m() == 0);
    const Index c = 1 + trial % split.m();
    const Mat v_perp = orthocomplement(split.R_I).leftCols(c);
    const Mat b = jacobian_bw(split, v_perp).matrix;
    const Mat omega = fixtures::random_pd(rng, p * p);
    const Index rank = numerical_rank(b * omega * b.transpose(), 1e-8);
    ++total;
    if (rank == split.k() * c) {
      ++matched;
    } else if (first_miss.empty()) {
      first_miss = fmt(" (first miss: p=%ld k=%ld c=%ld rank=%ld)", static_cast<long>(p),
                       static_cast<long>(split.k()), static_cast<long>(c), static_cast<long>(rank));
    }
  }
  return {matched == total, fmt("rank(Omega_W) == k*c on %d/%d instances%s, %.2fs", matched,
                                total, first_miss.c_str(), clock.seconds())};
}

// Signed trade flows between four firms.
Mat trade_matrix() {
  Mat a(4, 4);
  a << 0.0, 0.8, 0.3, -0.2,
       0.5, 0.0, 0.6, 0.4,
       0.2, 0.7, 0.0, 0.5,
       -0.1, 0.3, 0.9, 0.0;
  return a;
}

Verdict criterion9() {
  Stopwatch clock;
  const Mat a = trade_matrix();
  const Mat omega_m = ar_covariance(4, 0.3, 0.25);
  const Mat factor = column_factor(omega_m);
  const CentralityResult truth = katz_scores(a);
  const Vec s = truth.scores;
  const Index reps = 5000, n = 2000;
  Index inside = 0, failures = 0;
  std::vector<Index> covered(3, 0);
  for (Index r = 0; r < reps; ++r) {
    NormalStream rng(99, 0, static_cast<std::uint64_t>(r));
    const MatrixSample sample = estimate_from_vectorized(draw_vectorized(a, factor, n, rng), 4);
    try {
      inside += score_in_confidence_set(sample, s, 0.05).inside ? 1 : 0;
      for (const ScoreInterval& ci : score_intervals(sample, 0.05)) {
        const double ratio = s[ci.index] / s[3];
        covered[static_cast<std::size_t>(ci.index)] += (ci.lo <= ratio && ratio <= ci.hi) ? 1 : 0;
      }
    } catch (const Error&) {
      ++failures;
    }
  }
  const double ok = static_cast<double>(reps - failures);
  const double rate = inside / ok;
  bool pass = rate >= 0.935 && rate <= 0.965 && failures * 1000 < reps;
  std::string cov;
  for (Index c : covered) {
    const double cr = c / ok;
    pass = pass && cr >= 0.935 && cr <= 0.965;
    cov += fmt(" %.4f", cr);
  }
  return {pass, fmt("trade graph p=4, n=2000, reps=5000: set coverage %.4f, ratio CI coverage%s "
                    "(band [0.935,0.965]), %.1fs",
                    rate, cov.c_str(), clock.seconds())};
}

Verdict criterion10() {
  Mat m1(2, 2), m2(2, 2);
  m1 << 1, 3, 1, 1;
  m2 << 1, -3, -1, 1;
  const SymmetryCheck c1 = quasi_symmetry_check(m1);
  bool ok1 = c1.symmetrizable && c1.certificate.has_value();
  double asym = INFINITY, min_eig = -INFINITY;
  if (ok1) {
    const Mat& g = *c1.certificate;
    const Mat gm = g * m1;
    asym = max_abs(gm - gm.transpose());
    min_eig = Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff();
    ok1 = asym <= 1e-8 && min_eig > 0;
  }
  const SymmetryCheck c2 = quasi_symmetry_check(m2);
  std::string m2_note;
  if (c2.symmetrizable && c2.certificate) {
    const Mat gm = *c2.certificate * m2;
    m2_note = fmt("; M2 reported symmetrizable: real roots 1+-sqrt(3), certificate asymmetry %.1e",
                  max_abs(gm - gm.transpose()));
  }
  return {ok1 && !c2.symmetrizable,
          fmt("M1 symmetrizable=%d (asymmetry %.1e, min eig(Gamma) %.3f); M2 symmetrizable=%d "
              "(expected 0)%s",
              c1.symmetrizable, asym, min_eig, c2.symmetrizable, m2_note.c_str())};
}

// Bitwise, so that NaN placeholders for failed reps compare equal.
bool same_bits(const std::vector<std::vector<double>>& a,
               const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() ||
        std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

Verdict criterion11() {
  Stopwatch clock;
  SimConfig cfg = size_config();
  cfg.n_grid = {200, 1000};
  cfg.reps = 300;
  cfg.seed = 11;
  cfg.noise = NoiseModel::StudentT8;
  cfg.threads = 1;
  const SimResult a = run_size_power(cfg);
  const SimResult b = run_size_power(cfg);
  cfg.threads = 4;
  const SimResult c = run_size_power(cfg);
  const bool csv = sim_tables_csv(a) == sim_tables_csv(b) && sim_tables_csv(a) == sim_tables_csv(c);
  const bool json = sim_result_to_json(a, false).dump() == sim_result_to_json(c, false).dump();
  const bool draws = same_bits(a.wald_draws, c.wald_draws) && same_bits(a.t_draws, c.t_draws);
  return {csv && json && draws,
          fmt("same seed, 2 runs + 4 threads: tables identical=%d, json identical=%d, "
              "draws identical=%d, %.1fs",
              csv, json, draws, clock.seconds())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: eiginf_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

  int failed = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
              << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed ? 1 : 0;
}
