#include "charshrink/simulation.hpp"

#include <Eigen/Cholesky>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "charshrink/csv.hpp"
#include "charshrink/errors.hpp"
#include "charshrink/estimators.hpp"
#include "charshrink/rng.hpp"
#include "charshrink/tuning.hpp"

namespace charshrink {

namespace {

/// Inverse of the AR(1) covariance phi^|a-b|: tridiagonal with
/// 1/(1-phi^2) corners, (1+phi^2)/(1-phi^2) interior diagonal and
/// -phi/(1-phi^2) off-diagonals. Off-band zeros are exact.
Eigen::MatrixXd ar1_inverse(int m, double phi) {
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(m, m);
  const double scale = 1.0 / (1.0 - phi * phi);
  for (int i = 0; i < m; ++i) {
    const bool interior = i > 0 && i + 1 < m;
    inv(i, i) = (interior ? 1.0 + phi * phi : 1.0) * scale;
    if (i + 1 < m) {
      inv(i, i + 1) = -phi * scale;
      inv(i + 1, i) = -phi * scale;
    }
  }
  if (m == 1) inv(0, 0) = 1.0;
  return inv;
}

Eigen::MatrixXd ar1_covariance(int m, double phi) {
  Eigen::MatrixXd cov(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      cov(i, j) = std::pow(phi, std::abs(i - j));
    }
  }
  return cov;
}

TrueParams assemble_params(Eigen::MatrixXd sigma, Eigen::MatrixXd omega,
                           std::vector<Eigen::VectorXd> betas, int J) {
  TrueParams params;
  params.omega_star_inv = SpdMatrix(SymmetricMatrix(std::move(sigma)));
  params.omega_star = SpdMatrix(SymmetricMatrix(std::move(omega)));
  params.betas = std::move(betas);
  params.mus.reserve(params.betas.size());
  for (const auto& beta : params.betas) {
    params.mus.push_back(params.omega_star_inv.m() * beta);
  }
  params.priors.assign(static_cast<size_t>(J), 1.0 / J);
  params.J = J;
  return params;
}

std::vector<Eigen::VectorXd> window_betas(int p, int J, int width,
                                          double value) {
  std::vector<Eigen::VectorXd> betas(static_cast<size_t>(J),
                                     Eigen::VectorXd::Zero(p));
  for (int j = 1; j <= J; ++j) {
    for (int k = width * (j - 1); k < width * j; ++k) {
      betas[static_cast<size_t>(j - 1)](k) = value;
    }
  }
  return betas;
}

}  // namespace

TrueParams model1_params(int p, int J) {
  if (p < 4 * J) {
    std::ostringstream os;
    os << "model1_params: p = " << p << " < 4J = " << 4 * J;
    throw std::invalid_argument(os.str());
  }
  return assemble_params(ar1_covariance(p, 0.9), ar1_inverse(p, 0.9),
                         window_betas(p, J, 4, 1.5), J);
}

TrueParams model2_params(int p, int J) {
  if (p < 5 * J) {
    std::ostringstream os;
    os << "model2_params: p = " << p << " < 5J = " << 5 * J;
    throw std::invalid_argument(os.str());
  }
  const int m = 5 * J;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
  // Leading block: compound symmetry 0.5 I + 0.5 11^T, inverted in closed
  // form as 2 I - (2/(m+1)) 11^T.
  sigma.topLeftCorner(m, m).setConstant(0.5);
  sigma.topLeftCorner(m, m).diagonal().setOnes();
  omega.topLeftCorner(m, m).setConstant(-2.0 / (m + 1));
  omega.topLeftCorner(m, m).diagonal().array() += 2.0;
  if (p > m) {
    sigma.bottomRightCorner(p - m, p - m) = ar1_covariance(p - m, 0.5);
    omega.bottomRightCorner(p - m, p - m) = ar1_inverse(p - m, 0.5);
  }
  return assemble_params(std::move(sigma), std::move(omega),
                         window_betas(p, J, 5, 2.0), J);
}

Dataset generate_dataset(const TrueParams& params, const SplitSizes& sizes,
                         std::uint64_t seed) {
  if (sizes.train < 1 || sizes.validation < 1 || sizes.test < 1) {
    throw std::invalid_argument("generate_dataset: split sizes must be > 0");
  }
  const Index p = params.p();
  const int J = params.J;
  Eigen::LLT<Eigen::MatrixXd> llt(params.omega_star_inv.m());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(
        "generate_dataset: Cholesky factorization of Sigma* failed");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng(seed);
  const int total = sizes.train + sizes.validation + sizes.test;
  Eigen::MatrixXd X(total, p);
  std::vector<int> y(static_cast<size_t>(total));
  Eigen::VectorXd z(p);
  for (int i = 0; i < total; ++i) {
    const int label = rng.uniform_int(1, J);
    y[static_cast<size_t>(i)] = label;
    for (Index d = 0; d < p; ++d) z(d) = rng.normal();
    X.row(i) =
        (params.mus[static_cast<size_t>(label - 1)] + L * z).transpose();
  }

  auto slice = [&](int begin, int count) {
    return LabeledData(
        DenseMatrix(Eigen::MatrixXd(X.middleRows(begin, count))),
        std::vector<int>(y.begin() + begin, y.begin() + begin + count), J);
  };
  return Dataset{slice(0, sizes.train), slice(sizes.train, sizes.validation),
                 slice(sizes.train + sizes.validation, sizes.test)};
}

double misclassification_rate(const std::vector<int>& predicted,
                              const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("misclassification_rate: length mismatch");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("misclassification_rate: empty input");
  }
  Index wrong = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

double frobenius_error(const SymmetricMatrix& omega_bar,
                       const SymmetricMatrix& omega_star) {
  if (omega_bar.dim() != omega_star.dim()) {
    throw std::invalid_argument("frobenius_error: dimension mismatch");
  }
  return (omega_bar.m() - omega_star.m()).norm();
}

std::pair<double, double> tpr_tnr(
    const std::vector<std::vector<bool>>& estimated_supports,
    const DenseMatrix& true_deltas) {
  if (static_cast<Index>(estimated_supports.size()) != true_deltas.rows()) {
    throw std::invalid_argument("tpr_tnr: row count mismatch");
  }
  Index tp = 0, fn = 0, tn = 0, fp = 0;
  for (Index m = 0; m < true_deltas.rows(); ++m) {
    const auto& row = estimated_supports[static_cast<size_t>(m)];
    if (static_cast<Index>(row.size()) != true_deltas.cols()) {
      throw std::invalid_argument("tpr_tnr: column count mismatch");
    }
    for (Index k = 0; k < true_deltas.cols(); ++k) {
      const bool est = row[static_cast<size_t>(k)];
      if (true_deltas(m, k) != 0.0) {
        (est ? tp : fn) += 1;
      } else {
        (est ? fp : tn) += 1;
      }
    }
  }
  if (tp + fn == 0) {
    throw UndefinedRateError("tpr_tnr: no true positives in the truth");
  }
  if (tn + fp == 0) {
    throw UndefinedRateError("tpr_tnr: no true negatives in the truth");
  }
  return {static_cast<double>(tp) / static_cast<double>(tp + fn),
          static_cast<double>(tn) / static_cast<double>(tn + fp)};
}

Method parse_method(const std::string& name) {
  if (name == "proposed") return Method::proposed;
  if (name == "glasso") return Method::glasso;
  if (name == "lw") return Method::lw;
  if (name == "bayes") return Method::bayes;
  throw std::invalid_argument("unknown method '" + name +
                              "'; valid: proposed, glasso, lw, bayes");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::glasso: return "glasso";
    case Method::lw: return "lw";
    case Method::bayes: return "bayes";
  }
  return "?";
}

SolverConfig StudyConfig::study_solver_defaults() {
  SolverConfig cfg;
  cfg.eps_abs = 1e-7;
  cfg.eps_rel = 1e-7;
  cfg.max_iters = 2000;
  return cfg;
}

namespace {

struct GlassoFit {
  LdaModel model;
  Solution solution;
};

DenseMatrix true_delta_matrix(const TrueParams& params) {
  const Index p = params.p();
  Eigen::MatrixXd deltas(params.J - 1, p);
  for (int m = 2; m <= params.J; ++m) {
    deltas.row(m - 2) =
        (params.betas[0] - params.betas[static_cast<size_t>(m - 1)])
            .transpose();
  }
  return DenseMatrix(std::move(deltas));
}

std::vector<std::vector<bool>> supports_from_model(const LdaModel& model,
                                                   Index p, int J) {
  std::vector<std::vector<bool>> est(
      static_cast<size_t>(J - 1),
      std::vector<bool>(static_cast<size_t>(p), false));
  for (int m = 2; m <= J; ++m) {
    const auto& indices =
        model.pair_supports[static_cast<size_t>(pair_column_index(1, m, J))]
            .indices;
    for (int idx : indices) {
      est[static_cast<size_t>(m - 2)][static_cast<size_t>(idx)] = true;
    }
  }
  return est;
}

StudyRow evaluate_method(Method method, const StudyConfig& cfg,
                         const TrueParams& params, const Dataset& data,
                         int J, int replication) {
  StudyRow row;
  row.model = cfg.model;
  row.J = J;
  row.method = method_name(method);
  row.replication = replication;

  LdaModel model;
  switch (method) {
    case Method::proposed: {
      const auto grid = default_grid(
          lda_characteristic_problem(pooled_covariance(data.train),
                                     class_means(data.train), 0.0),
          cfg.grid_length);
      auto selection = validation_select<LdaFit>(
          data.train, data.validation, grid, lda_fit_fn(cfg.solver),
          [](const LdaFit& fit, const LabeledData& holdout) {
            return holdout_misclassification(fit.model, holdout);
          });
      model = std::move(selection.best_model.model);
      break;
    }
    case Method::glasso: {
      const SymmetricMatrix S = pooled_covariance(data.train);
      const auto grid =
          default_grid(glasso_problem(S, 0.0, true), cfg.grid_length);
      FitFn<GlassoFit> fit_fn = [&S, &cfg](const LabeledData& train,
                                           double lambda,
                                           const GlassoFit* warm) {
        const ProblemSpec prob = glasso_problem(S, lambda, true);
        const Solution sol =
            warm ? solve(prob, cfg.solver, state_from_solution(warm->solution))
                 : solve(prob, cfg.solver);
        FittedModel<GlassoFit> out;
        out.iters = sol.iters_used;
        out.converged = sol.converged;
        out.model =
            GlassoFit{model_from_precision(train, sol.omega_hat), sol};
        return out;
      };
      auto selection = validation_select<GlassoFit>(
          data.train, data.validation, grid, fit_fn,
          [](const GlassoFit& fit, const LabeledData& holdout) {
            return holdout_misclassification(fit.model, holdout);
          });
      model = std::move(selection.best_model.model);
      break;
    }
    case Method::lw: {
      const SymmetricMatrix S = pooled_covariance(data.train);
      double best_metric = std::numeric_limits<double>::infinity();
      bool have_best = false;
      for (const auto& [alpha, gamma] : ledoit_wolf_grid()) {
        LdaModel candidate = model_from_precision(
            data.train, ledoit_wolf_precision(S, alpha, gamma));
        const double metric =
            holdout_misclassification(candidate, data.validation);
        if (!have_best || metric < best_metric) {
          best_metric = metric;
          model = std::move(candidate);
          have_best = true;
        }
      }
      break;
    }
    case Method::bayes: {
      model.means = params.mus;
      model.priors = params.priors;
      model.omega_hat = params.omega_star;
      for (int j = 1; j < params.J; ++j) {
        for (int k = j + 1; k <= params.J; ++k) {
          PairSupport s{j, k, {}};
          const Eigen::VectorXd characteristic =
              params.omega_star.m() * (params.mus[static_cast<size_t>(j - 1)] -
                                       params.mus[static_cast<size_t>(k - 1)]);
          for (Index i = 0; i < characteristic.size(); ++i) {
            if (std::abs(characteristic(i)) > 1e-8) {
              s.indices.push_back(static_cast<int>(i));
            }
          }
          model.pair_supports.push_back(std::move(s));
        }
      }
      break;
    }
  }

  row.misclass = misclassification_rate(predict_batch(model, data.test.X),
                                        data.test.y);
  row.frob_err = method == Method::bayes
                     ? 0.0
                     : frobenius_error(model.omega_hat.sym(),
                                       params.omega_star.sym());
  const auto [tpr, tnr] = tpr_tnr(
      supports_from_model(model, params.p(), J), true_delta_matrix(params));
  row.tpr = tpr;
  row.tnr = tnr;
  return row;
}

struct Task {
  int J;
  int replication;  // 1-based
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  if (cfg.model != 1 && cfg.model != 2) {
    throw std::invalid_argument("run_study: model must be 1 or 2");
  }
  if (cfg.replications < 1) {
    throw std::invalid_argument("run_study: replications < 1");
  }

  std::vector<Task> tasks;
  for (int J : cfg.J_list) {
    for (int r = 1; r <= cfg.replications; ++r) tasks.push_back(Task{J, r});
  }

  const size_t n_methods = cfg.methods.size();
  std::vector<StudyRow> rows(tasks.size() * n_methods);

  auto run_task = [&](size_t t) {
    const Task& task = tasks[t];
    const std::uint64_t rep_seed =
        Rng::derive(Rng::derive(cfg.seed, static_cast<std::uint64_t>(task.J)),
                    static_cast<std::uint64_t>(task.replication));
    TrueParams params;
    Dataset data;
    std::string setup_error;
    try {
      params = cfg.model == 1 ? model1_params(cfg.p, task.J)
                              : model2_params(cfg.p, task.J);
      SplitSizes sizes = cfg.sizes;
      if (sizes.train == 0) sizes.train = 25 * task.J;
      if (sizes.validation == 0) sizes.validation = 200;
      if (sizes.test == 0) sizes.test = 1000;
      data = generate_dataset(params, sizes, rep_seed);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (size_t m = 0; m < n_methods; ++m) {
      StudyRow& row = rows[t * n_methods + m];
      if (!setup_error.empty()) {
        row.model = cfg.model;
        row.J = task.J;
        row.method = method_name(cfg.methods[m]);
        row.replication = task.replication;
        row.failed = true;
        row.error = setup_error;
        continue;
      }
      try {
        row = evaluate_method(cfg.methods[m], cfg, params, data, task.J,
                              task.replication);
      } catch (const std::exception& e) {
        row.model = cfg.model;
        row.J = task.J;
        row.method = method_name(cfg.methods[m]);
        row.replication = task.replication;
        row.failed = true;
        row.error = e.what();
      }
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (size_t t = next.fetch_add(1); t < tasks.size();
             t = next.fetch_add(1)) {
          run_task(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  StudyReport report;
  report.rows = std::move(rows);

  for (int J : cfg.J_list) {
    for (const Method method : cfg.methods) {
      const std::string name = method_name(method);
      std::vector<double> misclass, frob, tpr, tnr;
      for (const StudyRow& row : report.rows) {
        if (row.J != J || row.method != name || row.failed) continue;
        misclass.push_back(row.misclass);
        frob.push_back(row.frob_err);
        tpr.push_back(row.tpr);
        tnr.push_back(row.tnr);
      }
      StudySummaryRow s;
      s.model = cfg.model;
      s.J = J;
      s.method = name;
      s.replications_ok = static_cast<int>(misclass.size());
      s.mean_misclass = mean_of(misclass);
      s.se_misclass = stderr_of(misclass, s.mean_misclass);
      s.mean_frob = mean_of(frob);
      s.se_frob = stderr_of(frob, s.mean_frob);
      s.mean_tpr = mean_of(tpr);
      s.se_tpr = stderr_of(tpr, s.mean_tpr);
      s.mean_tnr = mean_of(tnr);
      s.se_tnr = stderr_of(tnr, s.mean_tnr);
      report.summary.push_back(std::move(s));
    }
  }
  return report;
}

void write_study_csv(const std::filesystem::path& path,
                     const StudyReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const StudyRow& r : report.rows) {
    if (r.failed) {
      rows.push_back({std::to_string(r.model), std::to_string(r.J), r.method,
                      std::to_string(r.replication), "", "", "", "", "1",
                      r.error});
    } else {
      rows.push_back({std::to_string(r.model), std::to_string(r.J), r.method,
                      std::to_string(r.replication), format_double(r.misclass),
                      format_double(r.frob_err), format_double(r.tpr),
                      format_double(r.tnr), "0", ""});
    }
  }
  write_table_csv(path,
                  {"model", "J", "method", "replication", "misclass",
                   "frob_err", "tpr", "tnr", "failed", "error"},
                  rows);
}

void write_study_summary_csv(const std::filesystem::path& path,
                             const StudyReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const StudySummaryRow& s : report.summary) {
    rows.push_back({std::to_string(s.model), std::to_string(s.J), s.method,
                    std::to_string(s.replications_ok),
                    format_double(s.mean_misclass),
                    format_double(s.se_misclass), format_double(s.mean_frob),
                    format_double(s.se_frob), format_double(s.mean_tpr),
                    format_double(s.se_tpr), format_double(s.mean_tnr),
                    format_double(s.se_tnr)});
  }
  write_table_csv(path,
                  {"model", "J", "method", "replications_ok", "mean_misclass",
                   "se_misclass", "mean_frob", "se_frob", "mean_tpr", "se_tpr",
                   "mean_tnr", "se_tnr"},
                  rows);
}

}  // namespace charshrink
