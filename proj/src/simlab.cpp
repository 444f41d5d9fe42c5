#include "eiginf/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "eiginf/perturb.hpp"

namespace eiginf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

// Uniform on (0, 1].
double open_uniform(std::mt19937_64& engine) {
  return 1.0 - static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class Body>
void parallel_for(Index count, unsigned threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(count, 1)));
  if (threads <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (Index i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double finite_ks(const std::vector<double>& draws, const std::function<double(double)>& cdf_fn) {
  std::vector<double> ok;
  ok.reserve(draws.size());
  for (double d : draws) {
    if (!std::isnan(d)) ok.push_back(d);
  }
  if (ok.empty()) return kNaN;
  return ks_distance(ok, cdf_fn);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto seq = make_seed(seed, stream, index);
  engine_.seed(seq);
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = open_uniform(engine_);
  const double u2 = open_uniform(engine_);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Mat column_factor(const Mat& omega_m) {
  require_square(omega_m, "column_factor");
  require_finite(omega_m, "column_factor");
  const Mat sym = 0.5 * (omega_m + omega_m.transpose());
  if ((sym - omega_m).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + omega_m.cwiseAbs().maxCoeff())) {
    throw InvalidArgumentError("Omega_M must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  const Vec ev = solver.eigenvalues();
  const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  if (ev.size() && ev.minCoeff() < -1e-12 * scale) {
    std::ostringstream os;
    os << "Omega_M is not positive semidefinite (smallest eigenvalue " << ev.minCoeff() << ")";
    throw InvalidArgumentError(os.str());
  }
  return solver.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Mat draw_vectorized(const Mat& m, const Mat& factor, Index n, NormalStream& rng,
                    NoiseModel noise) {
  require_square(m, "draw_vectorized");
  const Index p = m.rows();
  if (factor.rows() != p || factor.cols() != p) {
    throw DimensionError("draw_vectorized: factor must be p x p");
  }
  Mat z(p, p * n);
  double* data = z.data();
  const Index total = z.size();
  if (noise == NoiseModel::Gaussian) {
    for (Index i = 0; i < total; ++i) data[i] = rng.next();
  } else {
    const double unit = std::sqrt(6.0 / 8.0);
    for (Index i = 0; i < total; ++i) {
      const double num = rng.next();
      double chi = 0.0;
      for (int d = 0; d < 8; ++d) {
        const double g = rng.next();
        chi += g * g;
      }
      data[i] = unit * num / std::sqrt(chi / 8.0);
    }
  }
  Mat x = factor * z;
  Eigen::Map<Mat> columns(x.data(), p * p, n);
  return columns.colwise() + vec(m);
}

MatrixSample draw_sample(const Mat& m, const Mat& omega_m, Index n, NormalStream& rng,
                         NoiseModel noise, CovarianceStructure structure,
                         bool keep_observations) {
  const Mat factor = column_factor(omega_m);
  const Mat columns = draw_vectorized(m, factor, n, rng, noise);
  MatrixSample out = estimate_from_vectorized(columns, m.rows(), structure);
  if (keep_observations) {
    for (Index i = 0; i < n; ++i) out.observations.push_back(unvec(columns.col(i), m.rows(), m.rows()));
  }
  return out;
}

void validate(const SimConfig& cfg) {
  require_square(cfg.m_true, "SimConfig.m_true");
  require_finite(cfg.m_true, "SimConfig.m_true");
  const Index p = cfg.m_true.rows();
  if (cfg.omega_m.rows() != p || cfg.omega_m.cols() != p) {
    throw DimensionError("SimConfig.omega_m must be p x p");
  }
  if (cfg.reps < 100) throw InvalidArgumentError("SimConfig.reps must be >= 100");
  if (cfg.n_grid.empty()) throw InvalidArgumentError("SimConfig.n_grid is empty");
  for (Index n : cfg.n_grid) {
    if (n < 2) throw InvalidArgumentError("SimConfig.n_grid entries must be >= 2");
  }
  if (cfg.alpha_grid.empty()) throw InvalidArgumentError("SimConfig.alpha_grid is empty");
  for (double a : cfg.alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgumentError("SimConfig.alpha_grid must lie in (0, 1)");
  }
  if (cfg.hypothesis.candidate.rows() != p) {
    throw DimensionError("SimConfig.hypothesis candidate must have p rows");
  }
  if (cfg.alternative_shift &&
      (cfg.alternative_shift->rows() != p || cfg.alternative_shift->cols() != p)) {
    throw DimensionError("SimConfig.alternative_shift must be p x p");
  }
}

SimResult run_size_power(const SimConfig& cfg) {
  validate(cfg);
  const auto started = std::chrono::steady_clock::now();
  const Index p = cfg.m_true.rows();
  const Mat factor = column_factor(cfg.omega_m);
  const Mat m_draw = cfg.alternative_shift ? Mat(cfg.m_true + *cfg.alternative_shift) : cfg.m_true;

  std::optional<double> d0;
  if (cfg.t_coefficient) {
    if (cfg.t_coefficient->d0) {
      d0 = cfg.t_coefficient->d0;
    } else {
      const SpectralSplit truth = split_matrix(cfg.m_true, cfg.hypothesis.selector);
      const Mat d = normalized_coefficients(truth.R_I);
      if (cfg.t_coefficient->row >= d.rows() || cfg.t_coefficient->col >= d.cols() ||
          cfg.t_coefficient->row < 0 || cfg.t_coefficient->col < 0) {
        throw InvalidArgumentError("SimConfig.t_coefficient outside D");
      }
      d0 = d(cfg.t_coefficient->row, cfg.t_coefficient->col);
    }
  }

  SimResult out;
  out.n_grid = cfg.n_grid;
  out.alpha_grid = cfg.alpha_grid;
  out.reps = cfg.reps;
  const Index rows = static_cast<Index>(cfg.n_grid.size());
  const Index cols = static_cast<Index>(cfg.alpha_grid.size());
  out.wald_rejection = Mat::Zero(rows, cols);
  if (d0) out.t_rejection = Mat::Zero(rows, cols);

  TestOptions options;
  options.levels.clear();
  for (Index g = 0; g < rows; ++g) {
    const Index n = cfg.n_grid[static_cast<std::size_t>(g)];
    std::vector<double> w(static_cast<std::size_t>(cfg.reps), kNaN);
    std::vector<double> w_p(w.size(), kNaN);
    std::vector<Index> w_df(w.size(), 0);
    std::vector<double> t(w.size(), kNaN);
    std::vector<double> t_p(w.size(), kNaN);

    parallel_for(cfg.reps, cfg.threads, [&](Index r) {
      NormalStream rng(cfg.seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(r));
      const MatrixSample sample =
          estimate_from_vectorized(draw_vectorized(m_draw, factor, n, rng, cfg.noise), p,
                                   cfg.structure);
      const auto idx = static_cast<std::size_t>(r);
      try {
        const TestReport rep = wald_test(sample, cfg.hypothesis, options);
        w[idx] = rep.statistic;
        w_p[idx] = rep.p_value;
        w_df[idx] = rep.df;
      } catch (const Error&) {
      }
      if (d0) {
        try {
          const NormalizedEstimate est = estimate_D(sample, cfg.hypothesis.selector);
          const TestReport rep =
              t_test(est, cfg.t_coefficient->row, cfg.t_coefficient->col, *d0, options);
          t[idx] = rep.statistic;
          t_p[idx] = rep.p_value;
        } catch (const Error&) {
        }
      }
    });

    Index df = 0;
    for (Index v : w_df) df = std::max(df, v);
    if (g == 0) out.wald_df = df;

    auto tabulate = [&](const std::vector<double>& pv, Mat& table) {
      Index ok = 0;
      for (double pval : pv) ok += std::isnan(pval) ? 0 : 1;
      for (Index a = 0; a < cols; ++a) {
        const double level = cfg.alpha_grid[static_cast<std::size_t>(a)];
        Index hits = 0;
        for (double pval : pv) hits += (!std::isnan(pval) && pval < level) ? 1 : 0;
        table(g, a) = ok ? static_cast<double>(hits) / static_cast<double>(ok) : kNaN;
      }
      return cfg.reps - ok;
    };
    out.wald_failures.push_back(tabulate(w_p, out.wald_rejection));
    const Distribution chi = Distribution::chi2(std::max<Index>(df, 1));
    out.wald_ks.push_back(df > 0 ? finite_ks(w, [&](double x) { return cdf(x, chi); }) : kNaN);
    out.wald_draws.push_back(std::move(w));
    if (d0) {
      out.t_failures.push_back(tabulate(t_p, out.t_rejection));
      const Distribution normal = Distribution::std_normal();
      out.t_ks.push_back(finite_ks(t, [&](double x) { return cdf(x, normal); }));
      out.t_draws.push_back(std::move(t));
    }
  }
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string sim_tables_csv(const SimResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "table,test,n,alpha,value\n";
  auto emit = [&](const std::string& test, const Mat& table, const std::vector<double>& ks,
                  const std::vector<Index>& failures) {
    if (ks.empty()) return;
    for (std::size_t g = 0; g < r.n_grid.size(); ++g) {
      for (std::size_t a = 0; a < r.alpha_grid.size(); ++a) {
        os << "rejection," << test << "," << r.n_grid[g] << "," << r.alpha_grid[a] << ","
           << table(static_cast<Index>(g), static_cast<Index>(a)) << "\n";
      }
      os << "ks," << test << "," << r.n_grid[g] << ",," << ks[g] << "\n";
      os << "failures," << test << "," << r.n_grid[g] << ",," << failures[g] << "\n";
    }
  };
  emit("wald", r.wald_rejection, r.wald_ks, r.wald_failures);
  emit("t", r.t_rejection, r.t_ks, r.t_failures);
  return os.str();
}

Json sim_result_to_json(const SimResult& r, bool include_runtime) {
  auto nan_safe = [](double x) { return std::isnan(x) ? Json(nullptr) : Json(x); };
  auto table = [&](const Mat& t) {
    Json rows = Json::array();
    for (Index i = 0; i < t.rows(); ++i) {
      Json row = Json::array();
      for (Index j = 0; j < t.cols(); ++j) row.push_back(nan_safe(t(i, j)));
      rows.push_back(row);
    }
    return rows;
  };
  auto list = [&](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(nan_safe(x));
    return a;
  };
  Json j;
  j["n_grid"] = r.n_grid;
  j["alpha_grid"] = r.alpha_grid;
  j["reps"] = r.reps;
  j["wald"] = {{"df", r.wald_df},
               {"rejection_rates", table(r.wald_rejection)},
               {"ks_distance", list(r.wald_ks)},
               {"failures", r.wald_failures}};
  if (!r.t_ks.empty()) {
    j["t"] = {{"rejection_rates", table(r.t_rejection)},
              {"ks_distance", list(r.t_ks)},
              {"failures", r.t_failures}};
  }
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

SimConfig sim_config_from_json(const Json& j, std::string_view source) {
  const std::string src(source);
  if (!j.is_object()) throw InputError(src + ": config must be a JSON object");
  SimConfig cfg;
  try {
    if (!j.contains("m_true") || !j.contains("omega_m")) {
      throw InputError(src + ": config needs m_true and omega_m");
    }
    cfg.m_true = matrix_from_json(j.at("m_true"), src + ".m_true");
    cfg.omega_m = matrix_from_json(j.at("omega_m"), src + ".omega_m");
    if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<Index>>();
    if (j.contains("reps")) cfg.reps = j.at("reps").get<Index>();
    if (j.contains("alpha_grid")) cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    if (j.contains("alternative_shift")) {
      cfg.alternative_shift = matrix_from_json(j.at("alternative_shift"), src + ".alternative_shift");
    }
    const std::string noise = j.value("noise", std::string("gaussian"));
    if (noise == "gaussian") {
      cfg.noise = NoiseModel::Gaussian;
    } else if (noise == "student_t8") {
      cfg.noise = NoiseModel::StudentT8;
    } else {
      throw InputError(src + ": noise must be 'gaussian' or 'student_t8'");
    }
    const std::string structure = j.value("structure", std::string("full"));
    if (structure == "full") {
      cfg.structure = CovarianceStructure::Full;
    } else if (structure == "kronecker") {
      cfg.structure = CovarianceStructure::KroneckerColumns;
    } else {
      throw InputError(src + ": structure must be 'full' or 'kronecker'");
    }

    const Json hyp = j.value("hypothesis", Json::object());
    cfg.hypothesis.selector = RootSelector::parse(hyp.value("select", std::string("largest:1")));
    if (hyp.contains("candidate")) {
      cfg.hypothesis.candidate = matrix_from_json(hyp.at("candidate"), src + ".hypothesis.candidate");
      const std::string form = hyp.value("form", std::string("subspace"));
      if (form == "subspace") {
        cfg.hypothesis.form = CandidateForm::Subspace;
      } else if (form == "orthocomplement") {
        cfg.hypothesis.form = CandidateForm::Orthocomplement;
      } else {
        throw InputError(src + ": hypothesis.form must be 'subspace' or 'orthocomplement'");
      }
    } else {
      // Default: the true eigenspace of m_true, so the data satisfy H0.
      cfg.hypothesis.candidate = split_matrix(cfg.m_true, cfg.hypothesis.selector).R_I;
      cfg.hypothesis.form = CandidateForm::Subspace;
    }
    if (j.contains("t_coefficient")) {
      const Json& tc = j.at("t_coefficient");
      CoefficientTest test;
      test.row = tc.at("row").get<Index>() - 1;
      test.col = tc.at("col").get<Index>() - 1;
      if (tc.contains("d0")) test.d0 = tc.at("d0").get<double>();
      cfg.t_coefficient = test;
    }
  } catch (const Json::exception& e) {
    throw InputError(src + ": " + e.what());
  }
  validate(cfg);
  return cfg;
}

std::vector<double> log_grid(double lo, double hi, Index count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw InvalidArgumentError("log_grid: need 0 < lo < hi and at least 2 points");
  }
  std::vector<double> out;
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (Index i = 0; i < count; ++i) out.push_back(lo * std::exp(step * static_cast<double>(i)));
  out.back() = hi;
  return out;
}

RemainderSlopes remainder_order(const Mat& m, const Mat& e, const RootSelector& sel,
                                const Mat& v_perp, const std::vector<double>& t_grid,
                                const SpectralTolerances& tol) {
  if (t_grid.size() < 6) throw InvalidArgumentError("remainder_order: need at least 6 grid points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 1e-5 * (1 - 1e-12) && t_grid[i] <= 1e-1 * (1 + 1e-12))) {
      throw InvalidArgumentError("remainder_order: grid points must lie in [1e-5, 1e-1]");
    }
    if (i && !(t_grid[i] > t_grid[i - 1])) {
      throw InvalidArgumentError("remainder_order: grid must be increasing");
    }
  }
  const double step = std::log(t_grid[1] / t_grid[0]);
  for (std::size_t i = 2; i < t_grid.size(); ++i) {
    if (std::abs(std::log(t_grid[i] / t_grid[i - 1]) - step) > 1e-6 * std::abs(step)) {
      throw InvalidArgumentError("remainder_order: grid must be log-spaced");
    }
  }
  require_square(e, "remainder_order (E)");
  if (e.rows() != m.rows()) throw DimensionError("remainder_order: E must match M");

  const SpectralSplit split = split_matrix(m, sel, tol);
  if (v_perp.rows() != split.p()) throw DimensionError("remainder_order: v_perp must have p rows");
  const double annihilation = (v_perp.transpose() * split.R_I).norm();
  if (annihilation > 1e-10 * (1.0 + v_perp.norm() * split.R_I.norm())) {
    throw InvalidArgumentError(
        "remainder_order: v_perp must annihilate the selected eigenspace (v_perp' R_I = 0)");
  }
  const RootSelector matched = matching_selector(split);
  const Mat base = v_perp.transpose() * split.projector_I();
  const Mat d1 = psi_dot(e, split, v_perp, tol.gap);
  const Mat d2 = psi_ddot(e, split, v_perp, tol.gap);

  RemainderSlopes out;
  out.t = t_grid;
  std::vector<double> x1, y1, x2, y2;
  for (double t : t_grid) {
    const Mat first = psi(m + t * e, v_perp, matched, tol) - base - t * d1;
    const Mat second = first - 0.5 * t * t * d2;
    out.first_norms.push_back(first.norm());
    out.second_norms.push_back(second.norm());
    if (first.norm() >= 1e-14) {
      x1.push_back(std::log(t));
      y1.push_back(std::log(first.norm()));
    }
    if (second.norm() >= 1e-14) {
      x2.push_back(std::log(t));
      y2.push_back(std::log(second.norm()));
    }
  }
  out.first_exact = x1.empty();
  out.second_exact = x2.empty();
  out.first_order = x1.size() >= 2 ? ls_slope(x1, y1) : kNaN;
  out.second_order = x2.size() >= 2 ? ls_slope(x2, y2) : kNaN;
  return out;
}

}  // namespace eiginf
