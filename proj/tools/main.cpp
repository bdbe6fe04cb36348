#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "charshrink/admm.hpp"
#include "charshrink/csv.hpp"
#include "charshrink/estimators.hpp"
#include "charshrink/lda.hpp"
#include "charshrink/simulation.hpp"
#include "charshrink/tuning.hpp"
#include "charshrink/verification.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace charshrink;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 usage/input error, 3 numerical failure.
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open: " + path.string());
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

std::string digest_hex(const fs::path& path) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64_file(path)));
  return hex;
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, fs::path out_dir)
      : command_(std::move(command)),
        out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_dir_);
  }

  void set_config(json config) { config_ = std::move(config); }
  void add_input(const std::string& name, const fs::path& path) {
    inputs_[name] = {{"path", path.string()}, {"digest", digest_hex(path)}};
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  void write() const {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    json manifest{{"command", command_},   {"version", kVersion},
                  {"config", config_},     {"inputs", inputs_},
                  {"seed", seed_},         {"timing_ms", elapsed.count()}};
    std::ofstream out(out_dir_ / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path out_dir_;
  json config_ = json::object();
  json inputs_ = json::object();
  std::uint64_t seed_ = 0;
  std::chrono::steady_clock::time_point start_;
};

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i];
  return v;
}

struct SolverFlags {
  double rho = 1.0;
  double tau = 0.0;  // 0 => auto
  int max_iters = 5000;
  double tol_abs = 1e-8;
  double tol_rel = 1e-8;
  bool adaptive_rho = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "augmented Lagrangian parameter");
    cmd->add_option("--tau", tau,
                    "prox-linear step bound; 0 selects the default");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--tol-abs", tol_abs, "absolute stopping tolerance");
    cmd->add_option("--tol-rel", tol_rel, "relative stopping tolerance");
    cmd->add_flag("--adaptive-rho", adaptive_rho,
                  "residual-balancing rho adaptation");
  }

  SolverConfig to_config(bool record_trace = false) const {
    SolverConfig cfg;
    cfg.rho = rho;
    if (tau > 0.0) cfg.tau = tau;
    cfg.max_iters = max_iters;
    cfg.eps_abs = tol_abs;
    cfg.eps_rel = tol_rel;
    cfg.adaptive_rho = adaptive_rho;
    cfg.record_trace = record_trace;
    return cfg;
  }

  json to_json() const {
    return {{"rho", rho},         {"tau", tau},
            {"max_iters", max_iters}, {"tol_abs", tol_abs},
            {"tol_rel", tol_rel}, {"adaptive_rho", adaptive_rho}};
  }
};

int default_threads() {
  if (const char* env = std::getenv("CHARSHRINK_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& trace) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(trace.size());
  for (const TraceRow& row : trace) {
    rows.push_back({std::to_string(row.iter), format_double(row.objective),
                    format_double(row.primal_residual),
                    format_double(row.dual_residual)});
  }
  write_table_csv(path, {"iter", "objective", "primal_residual",
                         "dual_residual"},
                  rows);
}

void write_supports_csv(const fs::path& path, const LdaModel& model) {
  std::vector<std::vector<std::string>> rows;
  for (const PairSupport& s : model.pair_supports) {
    for (int idx : s.indices) {
      rows.push_back({std::to_string(s.j), std::to_string(s.k),
                      std::to_string(idx + 1)});
    }
  }
  write_table_csv(path, {"j", "k", "variable"}, rows);
}

void write_selection_csv(const fs::path& path,
                         const std::vector<SelectionRow>& table) {
  std::vector<std::vector<std::string>> rows;
  for (const SelectionRow& row : table) {
    rows.push_back({format_double(row.lambda),
                    std::isnan(row.metric) ? "" : format_double(row.metric),
                    std::to_string(row.iters), row.converged ? "1" : "0"});
  }
  write_table_csv(path, {"lambda", "metric", "iters", "converged"}, rows);
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
  std::string cov, A, B, C, weights, trace;
  double lambda = 0.0;
  std::string out_dir = ".";
  SolverFlags solver;
};

int run_estimate(const EstimateOpts& opt) {
  ManifestWriter manifest("estimate", opt.out_dir);
  manifest.add_input("cov", opt.cov);
  manifest.add_input("A", opt.A);
  manifest.add_input("B", opt.B);
  if (!opt.C.empty()) manifest.add_input("C", opt.C);
  if (!opt.weights.empty()) manifest.add_input("penalty_weights", opt.weights);

  const SymmetricMatrix S(read_matrix_csv(opt.cov).m());
  const DenseMatrix A = read_matrix_csv(opt.A);
  const DenseMatrix B = read_matrix_csv(opt.B);
  const DenseMatrix C = opt.C.empty()
                            ? DenseMatrix::zero(A.rows(), B.cols())
                            : read_matrix_csv(opt.C);
  DenseMatrix weights;
  if (!opt.weights.empty()) weights = read_matrix_csv(opt.weights);

  ProblemSpec prob(S, A, B, C, opt.lambda, weights);
  manifest.set_config({{"lambda", opt.lambda},
                       {"solver", opt.solver.to_json()},
                       {"trace", !opt.trace.empty()}});

  const Solution sol = solve(prob, opt.solver.to_config(!opt.trace.empty()));

  const fs::path out(opt.out_dir);
  write_matrix_csv(out / "omega_hat.csv", DenseMatrix(sol.omega_hat.m()));
  write_matrix_csv(out / "theta_hat.csv", sol.theta_hat);
  json diag{{"objective", sol.objective},
            {"primal_residual", sol.primal_residual},
            {"dual_residual", sol.dual_residual},
            {"iters_used", sol.iters_used},
            {"converged", sol.converged},
            {"lambda", opt.lambda},
            {"characteristic", characteristic_kind(prob).metadata}};
  std::ofstream(out / "diagnostics.json") << diag.dump(2) << "\n";
  if (!opt.trace.empty()) write_trace_csv(opt.trace, sol.trace);
  manifest.write();
  std::cout << "converged=" << (sol.converged ? "true" : "false")
            << " iters=" << sol.iters_used
            << " objective=" << format_double(sol.objective) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// lda fit / predict / screen

struct LdaFitOpts {
  std::string data;
  double lambda = -1.0;
  int cv = 0;
  int grid_len = 10;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  SolverFlags solver;
};

void write_model_json(const fs::path& out_dir, const LdaModel& model) {
  write_matrix_csv(out_dir / "omega_hat.csv",
                   DenseMatrix(model.omega_hat.m()));
  json means = json::array();
  for (const auto& mean : model.means) means.push_back(vector_to_json(mean));
  json supports = json::array();
  for (const PairSupport& s : model.pair_supports) {
    json idx = json::array();
    for (int i : s.indices) idx.push_back(i + 1);
    supports.push_back({{"j", s.j}, {"k", s.k}, {"variables", idx}});
  }
  json doc{{"p", model.means.empty() ? 0 : model.means[0].size()},
           {"J", model.means.size()},
           {"lambda", model.lambda},
           {"characteristic", "lda"},
           {"means", means},
           {"priors", model.priors},
           {"omega_hat_file", "omega_hat.csv"},
           {"pair_supports", supports}};
  std::ofstream(out_dir / "model.json") << doc.dump(2) << "\n";
}

LdaModel read_model_json(const fs::path& model_path) {
  std::ifstream in(model_path);
  if (!in) throw std::invalid_argument("cannot open: " + model_path.string());
  json doc = json::parse(in);
  LdaModel model;
  for (const auto& mean : doc.at("means")) {
    model.means.push_back(vector_from_json(mean));
  }
  model.priors = doc.at("priors").get<std::vector<double>>();
  model.lambda = doc.at("lambda").get<double>();
  const fs::path omega_path =
      model_path.parent_path() / doc.at("omega_hat_file").get<std::string>();
  model.omega_hat = SpdMatrix(SymmetricMatrix(read_matrix_csv(omega_path).m()));
  for (const auto& s : doc.at("pair_supports")) {
    PairSupport ps;
    ps.j = s.at("j").get<int>();
    ps.k = s.at("k").get<int>();
    for (const auto& v : s.at("variables")) {
      ps.indices.push_back(v.get<int>() - 1);
    }
    model.pair_supports.push_back(std::move(ps));
  }
  return model;
}

int run_lda_fit(const LdaFitOpts& opt) {
  if ((opt.lambda < 0.0) == (opt.cv == 0)) {
    std::cerr << "lda fit: exactly one of --lambda or --cv is required\n";
    return kExitUsage;
  }
  ManifestWriter manifest("lda fit", opt.out_dir);
  manifest.add_input("data", opt.data);
  manifest.set_seed(opt.seed);
  manifest.set_config({{"lambda", opt.lambda},
                       {"cv", opt.cv},
                       {"grid_len", opt.grid_len},
                       {"solver", opt.solver.to_json()}});

  const LabeledData data = read_labeled_csv(opt.data);
  const SolverConfig cfg = opt.solver.to_config();
  const fs::path out(opt.out_dir);

  double lambda = opt.lambda;
  if (opt.cv > 0) {
    const auto grid = default_grid(
        lda_characteristic_problem(pooled_covariance(data), class_means(data),
                                   0.0),
        opt.grid_len);
    const KfoldResult cv_result = kfold_select<LdaFit>(
        data, opt.cv, grid, lda_fit_fn(cfg),
        [](const LdaFit& fit, const LabeledData& holdout) {
          return holdout_misclassification(fit.model, holdout);
        },
        opt.seed);
    lambda = cv_result.best_lambda;
    write_selection_csv(out / "selection.csv", cv_result.table);
    if (!cv_result.stratified) {
      std::cout << "warning: some class smaller than fold count; "
                   "non-stratified folds used\n";
    }
  }

  const LdaFit fitted = fit_lda(data, lambda, cfg);
  write_model_json(out, fitted.model);
  write_supports_csv(out / "supports.csv", fitted.model);
  manifest.write();
  std::cout << "lambda=" << format_double(lambda)
            << " iters=" << fitted.solution.iters_used
            << " converged=" << (fitted.solution.converged ? "true" : "false")
            << "\n";
  return 0;
}

struct LdaPredictOpts {
  std::string model, data, out = "labels.csv";
  std::string out_dir = ".";
};

int run_lda_predict(const LdaPredictOpts& opt) {
  ManifestWriter manifest("lda predict", opt.out_dir);
  manifest.add_input("model", opt.model);
  manifest.add_input("data", opt.data);
  manifest.set_config({{"out", opt.out}});

  const LdaModel model = read_model_json(opt.model);
  const Index p = model.means.at(0).size();
  DenseMatrix X = read_matrix_csv(opt.data);
  if (X.cols() == p + 1) {
    // Labeled file; the trailing label column is ignored.
    X = DenseMatrix(Eigen::MatrixXd(X.m().leftCols(p)));
  } else if (X.cols() != p) {
    throw std::invalid_argument(
        "predict: data has " + std::to_string(X.cols()) +
        " columns, model expects " + std::to_string(p));
  }
  const std::vector<int> labels = predict_batch(model, X);
  Eigen::MatrixXd out(labels.size(), 1);
  for (size_t i = 0; i < labels.size(); ++i) {
    out(static_cast<Index>(i), 0) = labels[i];
  }
  write_matrix_csv(fs::path(opt.out_dir) / opt.out, DenseMatrix(out));
  manifest.write();
  return 0;
}

struct LdaScreenOpts {
  std::string data;
  int top = 0;
  std::string out_dir = ".";
};

int run_lda_screen(const LdaScreenOpts& opt) {
  ManifestWriter manifest("lda screen", opt.out_dir);
  manifest.add_input("data", opt.data);
  manifest.set_config({{"top", opt.top}});

  const LabeledData data = read_labeled_csv(opt.data);
  const std::vector<int> indices = f_statistic_screen(data, opt.top);
  Eigen::MatrixXd out(indices.size(), 1);
  for (size_t i = 0; i < indices.size(); ++i) {
    out(static_cast<Index>(i), 0) = indices[i] + 1;
  }
  write_matrix_csv(fs::path(opt.out_dir) / "indices.csv", DenseMatrix(out));
  manifest.write();
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  int model = 1;
  int p = 50;
  std::vector<int> J_list = {3};
  int reps = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"proposed", "glasso", "lw", "bayes"};
  std::vector<int> sizes;
  int grid_len = 10;
  int threads = default_threads();
  std::string out_dir = ".";
  SolverFlags solver;
};

int run_simulate(const SimulateOpts& opt) {
  StudyConfig cfg;
  cfg.model = opt.model;
  cfg.p = opt.p;
  cfg.J_list = opt.J_list;
  cfg.replications = opt.reps;
  cfg.seed = opt.seed;
  cfg.grid_length = opt.grid_len;
  cfg.threads = opt.threads;
  cfg.methods.clear();
  for (const std::string& name : opt.methods) {
    cfg.methods.push_back(parse_method(name));
  }
  if (!opt.sizes.empty()) {
    if (opt.sizes.size() != 3) {
      throw std::invalid_argument("--sizes needs train,validation,test");
    }
    cfg.sizes = SplitSizes{opt.sizes[0], opt.sizes[1], opt.sizes[2]};
  }

  ManifestWriter manifest("simulate", opt.out_dir);
  manifest.set_seed(opt.seed);
  json method_names = json::array();
  for (const std::string& name : opt.methods) method_names.push_back(name);
  manifest.set_config({{"model", opt.model},
                       {"p", opt.p},
                       {"J_list", opt.J_list},
                       {"replications", opt.reps},
                       {"methods", method_names},
                       {"grid_len", opt.grid_len},
                       {"threads", opt.threads},
                       {"sizes", opt.sizes}});

  const StudyReport report = run_study(cfg);
  const fs::path out(opt.out_dir);
  write_study_csv(out / "study.csv", report);
  write_study_summary_csv(out / "study_summary.csv", report);
  manifest.write();

  for (const StudySummaryRow& s : report.summary) {
    std::cout << "J=" << s.J << " method=" << s.method
              << " mean_misclass=" << format_double(s.mean_misclass)
              << " mean_frob=" << format_double(s.mean_frob) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify kkt / rate / xi

struct VerifyKktOpts {
  std::string cov, A, B, C, omega, theta;
  double lambda = 0.0;
  std::string out_dir = ".";
};

int run_verify_kkt(const VerifyKktOpts& opt) {
  ManifestWriter manifest("verify kkt", opt.out_dir);
  manifest.add_input("cov", opt.cov);
  manifest.add_input("A", opt.A);
  manifest.add_input("B", opt.B);
  if (!opt.C.empty()) manifest.add_input("C", opt.C);
  manifest.add_input("omega", opt.omega);
  if (!opt.theta.empty()) manifest.add_input("theta", opt.theta);
  manifest.set_config({{"lambda", opt.lambda}});

  const SymmetricMatrix S(read_matrix_csv(opt.cov).m());
  const DenseMatrix A = read_matrix_csv(opt.A);
  const DenseMatrix B = read_matrix_csv(opt.B);
  const DenseMatrix C = opt.C.empty()
                            ? DenseMatrix::zero(A.rows(), B.cols())
                            : read_matrix_csv(opt.C);
  ProblemSpec prob(S, A, B, C, opt.lambda);

  Solution sol;
  sol.omega_hat = SpdMatrix(SymmetricMatrix(read_matrix_csv(opt.omega).m()));
  if (!opt.theta.empty()) {
    sol.theta_hat = read_matrix_csv(opt.theta);
  } else {
    // Without theta, entries of the characteristic below 1e-8 in magnitude
    // are treated as the zero set.
    Eigen::MatrixXd characteristic =
        A.m() * sol.omega_hat.m() * B.m() - C.m();
    for (Index j = 0; j < characteristic.cols(); ++j) {
      for (Index i = 0; i < characteristic.rows(); ++i) {
        if (std::abs(characteristic(i, j)) <= 1e-8) {
          characteristic(i, j) = 0.0;
        }
      }
    }
    sol.theta_hat = DenseMatrix(std::move(characteristic));
  }

  const KktReport report = kkt_residual(prob, sol);
  json doc{{"residual", report.residual},
           {"max_subgradient_violation", report.max_subgradient_violation},
           {"support_consistent", report.support_consistent}};
  std::ofstream(fs::path(opt.out_dir) / "kkt.json") << doc.dump(2) << "\n";
  manifest.write();
  std::cout << "residual=" << format_double(report.residual)
            << " violation=" << format_double(report.max_subgradient_violation)
            << " support_consistent="
            << (report.support_consistent ? "true" : "false") << "\n";
  return 0;
}

struct VerifyRateOpts {
  std::vector<int> n_list;
  int p = 20;
  int reps = 20;
  std::uint64_t seed = 0;
  double K = 0.05;  // pilot-tuned so the desk-scale slope sits near -1/2
  int model = 1;
  std::string out_dir = ".";
};

int run_verify_rate(const VerifyRateOpts& opt) {
  ManifestWriter manifest("verify rate", opt.out_dir);
  manifest.set_seed(opt.seed);
  manifest.set_config({{"n_list", opt.n_list},
                       {"p", opt.p},
                       {"reps", opt.reps},
                       {"K", opt.K},
                       {"model", opt.model}});

  const TrueParams params =
      opt.model == 1 ? model1_params(opt.p, 1) : model2_params(opt.p, 1);
  const RateTable table =
      rate_experiment(params, opt.n_list, opt.reps, opt.K, opt.seed);
  write_rate_csv(fs::path(opt.out_dir) / "rate.csv", table);
  manifest.write();
  for (const RateRow& row : table.rows) {
    std::cout << "n=" << row.n << " mean_frob=" << format_double(row.mean_frob)
              << " stderr=" << format_double(row.stderr_frob) << "\n";
  }
  std::cout << "slope=" << format_double(table.slope) << "\n";
  return 0;
}

struct VerifyXiOpts {
  std::string A, B, support;
  int restarts = 20;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int run_verify_xi(const VerifyXiOpts& opt) {
  ManifestWriter manifest("verify xi", opt.out_dir);
  manifest.add_input("A", opt.A);
  manifest.add_input("B", opt.B);
  manifest.add_input("support", opt.support);
  manifest.set_seed(opt.seed);
  manifest.set_config({{"restarts", opt.restarts}});

  const DenseMatrix A = read_matrix_csv(opt.A);
  const DenseMatrix B = read_matrix_csv(opt.B);
  const auto support = support_from_mask(read_matrix_csv(opt.support));
  const double estimate =
      compatibility_constant_estimate(A, B, support, opt.restarts, opt.seed);
  json doc{{"estimate", estimate},
           {"restarts", opt.restarts},
           {"support_size", support.size()}};
  std::ofstream(fs::path(opt.out_dir) / "xi.json") << doc.dump(2) << "\n";
  manifest.write();
  std::cout << "xi_lower_bound=" << format_double(estimate) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized precision matrix estimation with characteristic "
               "shrinkage"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  EstimateOpts est;
  auto* cmd_est = app.add_subcommand(
      "estimate", "solve one penalized precision estimation problem");
  cmd_est->add_option("--cov", est.cov, "covariance CSV")->required();
  cmd_est->add_option("--A", est.A, "left characteristic matrix CSV")
      ->required();
  cmd_est->add_option("--B", est.B, "right characteristic matrix CSV")
      ->required();
  cmd_est->add_option("--C", est.C, "offset matrix CSV (default zero)");
  cmd_est->add_option("--penalty-weights", est.weights,
                      "per-entry penalty weight CSV");
  cmd_est->add_option("--lambda", est.lambda, "penalty level")->required();
  cmd_est->add_option("--trace", est.trace, "per-iteration trace CSV path");
  cmd_est->add_option("--out-dir", est.out_dir, "output directory");
  est.solver.attach(cmd_est);

  auto* cmd_lda = app.add_subcommand("lda", "discriminant analysis");
  cmd_lda->require_subcommand(1);

  LdaFitOpts lfit;
  auto* cmd_lfit = cmd_lda->add_subcommand("fit", "fit the model");
  cmd_lfit->add_option("--data", lfit.data, "labeled CSV (label last column)")
      ->required();
  cmd_lfit->add_option("--lambda", lfit.lambda, "penalty level");
  cmd_lfit->add_option("--cv", lfit.cv, "k-fold cross-validated selection");
  cmd_lfit->add_option("--grid-len", lfit.grid_len, "lambda grid length");
  cmd_lfit->add_option("--seed", lfit.seed, "fold assignment seed");
  cmd_lfit->add_option("--out-dir", lfit.out_dir, "output directory");
  lfit.solver.attach(cmd_lfit);

  LdaPredictOpts lpred;
  auto* cmd_lpred = cmd_lda->add_subcommand("predict", "classify rows");
  cmd_lpred->add_option("--model", lpred.model, "model.json path")->required();
  cmd_lpred->add_option("--data", lpred.data, "feature CSV")->required();
  cmd_lpred->add_option("--out", lpred.out, "output labels file name");
  cmd_lpred->add_option("--out-dir", lpred.out_dir, "output directory");

  LdaScreenOpts lscr;
  auto* cmd_lscr =
      cmd_lda->add_subcommand("screen", "rank variables by F statistic");
  cmd_lscr->add_option("--data", lscr.data, "labeled CSV")->required();
  cmd_lscr->add_option("--top", lscr.top, "how many variables to keep")
      ->required();
  cmd_lscr->add_option("--out-dir", lscr.out_dir, "output directory");

  SimulateOpts sim;
  auto* cmd_sim = app.add_subcommand("simulate", "replication study");
  cmd_sim->add_option("--model", sim.model, "data model (1 or 2)")->required();
  cmd_sim->add_option("--p", sim.p, "dimension")->required();
  cmd_sim->add_option("--J", sim.J_list, "class counts (comma separated)")
      ->required()
      ->delimiter(',');
  cmd_sim->add_option("--reps", sim.reps, "replications")->required();
  cmd_sim->add_option("--seed", sim.seed, "study seed");
  cmd_sim->add_option("--methods", sim.methods,
                      "methods: proposed,glasso,lw,bayes")
      ->delimiter(',');
  cmd_sim->add_option("--sizes", sim.sizes,
                      "train,validation,test split sizes")
      ->delimiter(',');
  cmd_sim->add_option("--grid-len", sim.grid_len, "lambda grid length");
  cmd_sim->add_option("--threads", sim.threads,
                      "replication parallelism (default CHARSHRINK_THREADS "
                      "or 1)");
  cmd_sim->add_option("--out-dir", sim.out_dir, "output directory");
  sim.solver.attach(cmd_sim);

  auto* cmd_verify = app.add_subcommand("verify", "numerical certificates");
  cmd_verify->require_subcommand(1);

  VerifyKktOpts vkkt;
  auto* cmd_vkkt =
      cmd_verify->add_subcommand("kkt", "first-order optimality residual");
  cmd_vkkt->add_option("--cov", vkkt.cov, "covariance CSV")->required();
  cmd_vkkt->add_option("--A", vkkt.A, "A CSV")->required();
  cmd_vkkt->add_option("--B", vkkt.B, "B CSV")->required();
  cmd_vkkt->add_option("--C", vkkt.C, "C CSV (default zero)");
  cmd_vkkt->add_option("--lambda", vkkt.lambda, "penalty level")->required();
  cmd_vkkt->add_option("--omega", vkkt.omega, "estimate CSV")->required();
  cmd_vkkt->add_option("--theta", vkkt.theta,
                       "sparse characteristic CSV (optional)");
  cmd_vkkt->add_option("--out-dir", vkkt.out_dir, "output directory");

  VerifyRateOpts vrate;
  auto* cmd_vrate =
      cmd_verify->add_subcommand("rate", "error-vs-n slope experiment");
  cmd_vrate->add_option("--n-list", vrate.n_list, "sample sizes")
      ->required()
      ->delimiter(',');
  cmd_vrate->add_option("--p", vrate.p, "dimension");
  cmd_vrate->add_option("--reps", vrate.reps, "replications per n");
  cmd_vrate->add_option("--seed", vrate.seed, "seed");
  cmd_vrate->add_option("--K", vrate.K, "lambda_n = K sqrt(log p / n)");
  cmd_vrate->add_option("--model", vrate.model, "truth model (1 or 2)");
  cmd_vrate->add_option("--out-dir", vrate.out_dir, "output directory");

  VerifyXiOpts vxi;
  auto* cmd_vxi =
      cmd_verify->add_subcommand("xi", "compatibility constant lower bound");
  cmd_vxi->add_option("--A", vxi.A, "A CSV")->required();
  cmd_vxi->add_option("--B", vxi.B, "B CSV")->required();
  cmd_vxi->add_option("--support", vxi.support, "0/1 mask CSV")->required();
  cmd_vxi->add_option("--restarts", vxi.restarts, "ascent restarts");
  cmd_vxi->add_option("--seed", vxi.seed, "seed");
  cmd_vxi->add_option("--out-dir", vxi.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_lfit->parsed()) return run_lda_fit(lfit);
    if (cmd_lpred->parsed()) return run_lda_predict(lpred);
    if (cmd_lscr->parsed()) return run_lda_screen(lscr);
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_vkkt->parsed()) return run_verify_kkt(vkkt);
    if (cmd_vrate->parsed()) return run_verify_rate(vrate);
    if (cmd_vxi->parsed()) return run_verify_xi(vxi);
  } catch (const DivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NotPositiveDefiniteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
