#include "charshrink/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "charshrink/csv.hpp"
#include "charshrink/estimators.hpp"

namespace charshrink {

LabeledData::LabeledData(DenseMatrix X_, std::vector<int> y_, int J_)
    : X(std::move(X_)), y(std::move(y_)), J(J_) {
  if (static_cast<Index>(y.size()) != X.rows()) {
    throw std::invalid_argument("LabeledData: label count != row count");
  }
  if (J < 1) throw std::invalid_argument("LabeledData: J < 1");
  for (int label : y) {
    if (label < 1 || label > J) {
      std::ostringstream os;
      os << "LabeledData: label " << label << " outside 1.." << J;
      throw std::invalid_argument(os.str());
    }
  }
}

std::vector<Index> class_counts(const LabeledData& data) {
  std::vector<Index> counts(static_cast<size_t>(data.J), 0);
  for (int label : data.y) ++counts[static_cast<size_t>(label - 1)];
  return counts;
}

std::vector<Eigen::VectorXd> class_means(const LabeledData& data) {
  const auto counts = class_counts(data);
  for (int j = 0; j < data.J; ++j) {
    if (counts[static_cast<size_t>(j)] == 0) {
      std::ostringstream os;
      os << "class_means: class " << (j + 1) << " has no observations";
      throw std::invalid_argument(os.str());
    }
  }
  std::vector<Eigen::VectorXd> means(
      static_cast<size_t>(data.J), Eigen::VectorXd::Zero(data.p()));
  for (Index i = 0; i < data.n(); ++i) {
    means[static_cast<size_t>(data.y[static_cast<size_t>(i)] - 1)] +=
        data.X.m().row(i).transpose();
  }
  for (int j = 0; j < data.J; ++j) {
    means[static_cast<size_t>(j)] /=
        static_cast<double>(counts[static_cast<size_t>(j)]);
  }
  return means;
}

SymmetricMatrix pooled_covariance(const LabeledData& data) {
  const auto means = class_means(data);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(data.p(), data.p());
  for (Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd centered =
        data.X.m().row(i).transpose() -
        means[static_cast<size_t>(data.y[static_cast<size_t>(i)] - 1)];
    acc.noalias() += centered * centered.transpose();
  }
  return SymmetricMatrix(Eigen::MatrixXd(acc / static_cast<double>(data.n())));
}

namespace {

std::vector<PairSupport> supports_from_theta(const DenseMatrix& theta, int J) {
  std::vector<PairSupport> supports;
  supports.reserve(static_cast<size_t>(J * (J - 1) / 2));
  for (int j = 1; j < J; ++j) {
    for (int k = j + 1; k <= J; ++k) {
      PairSupport s{j, k, {}};
      const int col = pair_column_index(j, k, J);
      for (Index i = 0; i < theta.rows(); ++i) {
        if (theta(i, col) != 0.0) s.indices.push_back(static_cast<int>(i));
      }
      supports.push_back(std::move(s));
    }
  }
  return supports;
}

std::vector<double> priors_from_counts(const std::vector<Index>& counts,
                                       Index n) {
  std::vector<double> priors(counts.size());
  for (size_t j = 0; j < counts.size(); ++j) {
    priors[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
  }
  return priors;
}

}  // namespace

LdaFit fit_lda(const LabeledData& data, double lambda, const SolverConfig& cfg,
               const SolverState* init) {
  const auto means = class_means(data);
  const SymmetricMatrix S = pooled_covariance(data);
  const ProblemSpec prob = lda_characteristic_problem(S, means, lambda);
  const Solution sol =
      init ? solve(prob, cfg, *init) : solve(prob, cfg);
  LdaModel model;
  model.means = means;
  model.priors = priors_from_counts(class_counts(data), data.n());
  model.omega_hat = sol.omega_hat;
  model.pair_supports = supports_from_theta(sol.theta_hat, data.J);
  model.lambda = lambda;
  return LdaFit{std::move(model), sol};
}

LdaModel fit(const LabeledData& data, double lambda, const SolverConfig& cfg) {
  return fit_lda(data, lambda, cfg).model;
}

LdaModel model_from_precision(const LabeledData& data, SpdMatrix omega,
                              double support_tol) {
  LdaModel model;
  model.means = class_means(data);
  model.priors = priors_from_counts(class_counts(data), data.n());
  model.omega_hat = std::move(omega);
  for (int j = 1; j < data.J; ++j) {
    for (int k = j + 1; k <= data.J; ++k) {
      PairSupport s{j, k, {}};
      const Eigen::VectorXd characteristic =
          model.omega_hat.m() * (model.means[static_cast<size_t>(j - 1)] -
                                 model.means[static_cast<size_t>(k - 1)]);
      for (Index i = 0; i < characteristic.size(); ++i) {
        if (std::abs(characteristic(i)) > support_tol) {
          s.indices.push_back(static_cast<int>(i));
        }
      }
      model.pair_supports.push_back(std::move(s));
    }
  }
  return model;
}

int predict(const LdaModel& model, const Eigen::VectorXd& x) {
  const int J = static_cast<int>(model.means.size());
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd omega_x = model.omega_hat.m() * x;
  for (int j = 1; j <= J; ++j) {
    const Eigen::VectorXd& mean = model.means[static_cast<size_t>(j - 1)];
    const double score = omega_x.dot(mean) -
                         0.5 * mean.dot(model.omega_hat.m() * mean) +
                         std::log(model.priors[static_cast<size_t>(j - 1)]);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

std::vector<int> predict_batch(const LdaModel& model, const DenseMatrix& X) {
  std::vector<int> labels(static_cast<size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) {
    labels[static_cast<size_t>(i)] =
        predict(model, X.m().row(i).transpose());
  }
  return labels;
}

std::vector<int> selected_variables(const LdaModel& model, int j, int k) {
  const int J = static_cast<int>(model.means.size());
  const int col = pair_column_index(j, k, J);
  return model.pair_supports[static_cast<size_t>(col)].indices;
}

std::vector<double> f_statistics(const LabeledData& data) {
  const auto means = class_means(data);
  const auto counts = class_counts(data);
  const int J = data.J;
  const Index n = data.n();
  const Eigen::VectorXd grand_mean = data.X.m().colwise().mean().transpose();
  std::vector<double> f(static_cast<size_t>(data.p()));
  for (Index col = 0; col < data.p(); ++col) {
    double ssb = 0.0;
    for (int j = 0; j < J; ++j) {
      const double d = means[static_cast<size_t>(j)](col) - grand_mean(col);
      ssb += static_cast<double>(counts[static_cast<size_t>(j)]) * d * d;
    }
    double ssw = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d =
          data.X(i, col) -
          means[static_cast<size_t>(data.y[static_cast<size_t>(i)] - 1)](col);
      ssw += d * d;
    }
    if (ssw == 0.0) {
      f[static_cast<size_t>(col)] =
          ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      f[static_cast<size_t>(col)] =
          (ssb / static_cast<double>(J - 1)) /
          (ssw / static_cast<double>(n - J));
    }
  }
  return f;
}

std::vector<int> f_statistic_screen(const LabeledData& data, int k) {
  if (k < 0 || k > data.p()) {
    std::ostringstream os;
    os << "f_statistic_screen: k = " << k << " outside 0.." << data.p();
    throw std::invalid_argument(os.str());
  }
  if (data.J < 2) {
    throw std::invalid_argument("f_statistic_screen: need at least 2 classes");
  }
  const auto f = f_statistics(data);
  std::vector<int> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&f](int a, int b) {
    return f[static_cast<size_t>(a)] > f[static_cast<size_t>(b)];
  });
  order.resize(static_cast<size_t>(k));
  return order;
}

LabeledData read_labeled_csv(const std::filesystem::path& path) {
  const DenseMatrix raw = read_matrix_csv(path);
  if (raw.cols() < 2) {
    throw std::invalid_argument(path.string() +
                                ": need at least one feature column");
  }
  const Index p = raw.cols() - 1;
  std::vector<int> y(static_cast<size_t>(raw.rows()));
  int J = 0;
  for (Index i = 0; i < raw.rows(); ++i) {
    const double v = raw(i, p);
    const int label = static_cast<int>(std::lround(v));
    if (std::abs(v - label) > 1e-9) {
      throw std::invalid_argument(path.string() + ": non-integer label " +
                                  format_double(v));
    }
    y[static_cast<size_t>(i)] = label;
    J = std::max(J, label);
  }
  return LabeledData(DenseMatrix(Eigen::MatrixXd(raw.m().leftCols(p))),
                     std::move(y), J);
}

void write_labeled_csv(const std::filesystem::path& path,
                       const LabeledData& data) {
  Eigen::MatrixXd m(data.n(), data.p() + 1);
  m.leftCols(data.p()) = data.X.m();
  for (Index i = 0; i < data.n(); ++i) {
    m(i, data.p()) = static_cast<double>(data.y[static_cast<size_t>(i)]);
  }
  write_matrix_csv(path, DenseMatrix(std::move(m)));
}

}  // namespace charshrink
