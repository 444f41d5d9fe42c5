#pragma once

// Seeded Monte Carlo lab: iid matrix samples M_i = M + Z_i with columns of
// Z_i drawn from N(0, Omega_M), size/power tables for the Wald and t tests,
// and Taylor-remainder slopes for the perturbation expansion.
//
// Replication r at grid point g draws from mt19937_64 seeded with
// seed_seq{seed, g, r}; normals come from Box-Muller. Results are stored by
// replication index, so tables do not depend on the thread count.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eiginf/inference.hpp"
#include "eiginf/matrix_io.hpp"

namespace eiginf {

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
  double next();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class NoiseModel {
  Gaussian,
  StudentT8  // unit-variance scaled t(8) columns; outside the Gaussian model
};

// F with F F' = Omega_M (symmetric eigen factor). Throws InvalidArgumentError
// when Omega_M has an eigenvalue below -1e-12 max|eig|.
Mat column_factor(const Mat& omega_m);

// p^2 x n matrix whose columns are vec(M + F Z_i).
Mat draw_vectorized(const Mat& m, const Mat& factor, Index n, NormalStream& rng,
                    NoiseModel noise = NoiseModel::Gaussian);

MatrixSample draw_sample(const Mat& m, const Mat& omega_m, Index n, NormalStream& rng,
                         NoiseModel noise = NoiseModel::Gaussian,
                         CovarianceStructure structure = CovarianceStructure::Full,
                         bool keep_observations = false);

struct CoefficientTest {
  Index row = 0;
  Index col = 0;
  std::optional<double> d0;  // default: the coefficient of M_true
};

struct SimConfig {
  Mat m_true;
  Mat omega_m;
  std::vector<Index> n_grid{2000};
  Index reps = 1000;
  std::vector<double> alpha_grid{0.01, 0.05, 0.10};
  std::uint64_t seed = 1;
  Hypothesis hypothesis;
  std::optional<Mat> alternative_shift;  // data drawn from M_true + shift
  NoiseModel noise = NoiseModel::Gaussian;
  CovarianceStructure structure = CovarianceStructure::Full;
  std::optional<CoefficientTest> t_coefficient;
  unsigned threads = 0;  // 0: hardware concurrency
};

void validate(const SimConfig& cfg);

struct SimResult {
  std::vector<Index> n_grid;
  std::vector<double> alpha_grid;
  Index reps = 0;
  Index wald_df = 0;
  Mat wald_rejection;  // n x alpha
  Mat t_rejection;     // n x alpha (empty without a coefficient test)
  std::vector<double> wald_ks;
  std::vector<double> t_ks;
  std::vector<Index> wald_failures;
  std::vector<Index> t_failures;
  std::vector<std::vector<double>> wald_draws;  // per n, NaN for failed reps
  std::vector<std::vector<double>> t_draws;
  double runtime_seconds = 0.0;  // not part of the deterministic tables
};

SimResult run_size_power(const SimConfig& cfg);

// Deterministic tables (no runtime): rejection rates, KS distances, failures.
std::string sim_tables_csv(const SimResult& r);
Json sim_result_to_json(const SimResult& r, bool include_runtime = true);
SimConfig sim_config_from_json(const Json& j, std::string_view source = "<config>");

struct RemainderSlopes {
  double first_order = 0.0;   // NaN when undefined
  double second_order = 0.0;  // NaN when undefined
  bool first_exact = false;   // remainder below 1e-14 on the whole grid
  bool second_exact = false;
  std::vector<double> t;
  std::vector<double> first_norms;
  std::vector<double> second_norms;
};

// Log-spaced grid of `count` points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, Index count);

// Least-squares slopes of log ||psi(M + tE) - psi(M) - t psi'(E)|| and of the
// same with t^2/2 psi''(E) removed, against log t. v_perp must annihilate R_I.
RemainderSlopes remainder_order(const Mat& m, const Mat& e, const RootSelector& sel,
                                const Mat& v_perp, const std::vector<double>& t_grid,
                                const SpectralTolerances& tol = {});

}  // namespace eiginf
