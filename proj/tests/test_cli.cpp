#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "charshrink/csv.hpp"
#include "charshrink/lda.hpp"
#include "charshrink/rng.hpp"
#include "charshrink/simulation.hpp"

using namespace charshrink;
namespace fs = std::filesystem;

#ifndef CHARSHRINK_CLI_PATH
#error "CHARSHRINK_CLI_PATH must point at the built binary"
#endif

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(CHARSHRINK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("estimate inverts the covariance at lambda zero") {
  TempDir dir("cs_cli_estimate");
  write_matrix_csv(dir / "S.csv", DenseMatrix{{2.0, 0.0}, {0.0, 4.0}});
  write_matrix_csv(dir / "I.csv", DenseMatrix::identity(2));

  const int rc = run_cli("estimate --cov " + (dir / "S.csv") + " --A " +
                         (dir / "I.csv") + " --B " + (dir / "I.csv") +
                         " --lambda 0 --out-dir " + (dir / "out"));
  REQUIRE(rc == 0);

  const DenseMatrix omega = read_matrix_csv(dir / "out/omega_hat.csv");
  CHECK(omega(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(omega(1, 1) == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(fs::exists(dir.path / "out/theta_hat.csv"));
  CHECK(fs::exists(dir.path / "out/diagnostics.json"));
  CHECK(fs::exists(dir.path / "out/manifest.json"));
  CHECK(slurp(dir.path / "out/manifest.json").find("estimate") !=
        std::string::npos);
}

TEST_CASE("estimate usage and shape errors exit with 2") {
  TempDir dir("cs_cli_usage");
  write_matrix_csv(dir / "S.csv", DenseMatrix{{2.0, 0.0}, {0.0, 4.0}});
  write_matrix_csv(dir / "A32.csv", DenseMatrix::zero(3, 3));

  CHECK(run_cli("estimate --cov " + (dir / "S.csv") + " --A " +
                (dir / "S.csv") + " --lambda 0") == 2);  // missing --B
  CHECK(run_cli("estimate --cov " + (dir / "S.csv") + " --A " +
                (dir / "A32.csv") + " --B " + (dir / "S.csv") +
                " --lambda 0 --out-dir " + (dir / "out")) == 2);  // shapes
  CHECK(run_cli("estimate --cov " + (dir / "missing.csv") + " --A " +
                (dir / "S.csv") + " --B " + (dir / "S.csv") +
                " --lambda 0 --out-dir " + (dir / "out")) == 2);  // io
}

TEST_CASE("estimate trace has one row per iteration") {
  TempDir dir("cs_cli_trace");
  write_matrix_csv(dir / "S.csv", DenseMatrix{{1.0, 0.4}, {0.4, 1.0}});
  write_matrix_csv(dir / "I.csv", DenseMatrix::identity(2));
  const int rc = run_cli("estimate --cov " + (dir / "S.csv") + " --A " +
                         (dir / "I.csv") + " --B " + (dir / "I.csv") +
                         " --lambda 0.1 --trace " + (dir / "trace.csv") +
                         " --out-dir " + (dir / "out"));
  REQUIRE(rc == 0);

  std::ifstream diag(dir.path / "out/diagnostics.json");
  std::string text((std::istreambuf_iterator<char>(diag)),
                   std::istreambuf_iterator<char>());
  const auto pos = text.find("\"iters_used\": ");
  REQUIRE(pos != std::string::npos);
  const int iters = std::atoi(text.c_str() + pos + 14);

  std::ifstream trace(dir.path / "trace.csv");
  int lines = 0;
  std::string line;
  while (std::getline(trace, line)) ++lines;
  CHECK(lines == iters + 1);  // header + one row per iteration
}

TEST_CASE("lda fit then predict recovers separable labels") {
  TempDir dir("cs_cli_lda");
  Rng rng(301);
  Eigen::MatrixXd X(60, 2);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    const int label = i < 30 ? 1 : 2;
    X(i, 0) = (label == 1 ? 3.0 : -3.0) + rng.normal();
    X(i, 1) = rng.normal();
    y[static_cast<size_t>(i)] = label;
  }
  const LabeledData data(DenseMatrix(X), y, 2);
  write_labeled_csv(dir / "train.csv", data);

  REQUIRE(run_cli("lda fit --data " + (dir / "train.csv") +
                  " --lambda 0.05 --out-dir " + (dir / "fit")) == 0);
  CHECK(fs::exists(dir.path / "fit/model.json"));
  CHECK(fs::exists(dir.path / "fit/supports.csv"));

  REQUIRE(run_cli("lda predict --model " + (dir / "fit/model.json") +
                  " --data " + (dir / "train.csv") + " --out-dir " +
                  (dir / "pred")) == 0);
  const DenseMatrix labels = read_matrix_csv(dir / "pred/labels.csv");
  REQUIRE(labels.rows() == 60);
  int correct = 0;
  for (Index i = 0; i < 60; ++i) {
    if (static_cast<int>(labels(i, 0)) == y[static_cast<size_t>(i)]) {
      ++correct;
    }
  }
  CHECK(correct >= 57);  // >= 95% training accuracy
}

TEST_CASE("lda fit with cross-validation emits a selection table") {
  TempDir dir("cs_cli_cv");
  Rng rng(307);
  Eigen::MatrixXd X(40, 2);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2 + 1;
    X(i, 0) = (label == 1 ? 2.0 : -2.0) + rng.normal();
    X(i, 1) = rng.normal();
    y[static_cast<size_t>(i)] = label;
  }
  write_labeled_csv(dir / "train.csv",
                    LabeledData(DenseMatrix(X), y, 2));
  REQUIRE(run_cli("lda fit --data " + (dir / "train.csv") +
                  " --cv 5 --grid-len 4 --seed 3 --out-dir " +
                  (dir / "fit")) == 0);
  CHECK(fs::exists(dir.path / "fit/selection.csv"));
  const std::string table = slurp(dir.path / "fit/selection.csv");
  CHECK(table.find("lambda,metric,iters,converged") != std::string::npos);
}

TEST_CASE("lda screen with k = p returns every column once") {
  TempDir dir("cs_cli_screen");
  Rng rng(311);
  Eigen::MatrixXd X(30, 4);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    y[static_cast<size_t>(i)] = i % 3 + 1;
    for (int d = 0; d < 4; ++d) X(i, d) = rng.normal();
    X(i, 2) += 2.0 * y[static_cast<size_t>(i)];
  }
  write_labeled_csv(dir / "d.csv", LabeledData(DenseMatrix(X), y, 3));
  REQUIRE(run_cli("lda screen --data " + (dir / "d.csv") +
                  " --top 4 --out-dir " + (dir / "out")) == 0);
  const DenseMatrix idx = read_matrix_csv(dir / "out/indices.csv");
  REQUIRE(idx.rows() == 4);
  CHECK(idx(0, 0) == 3.0);  // the informative column ranks first (1-based)
  std::vector<int> sorted;
  for (Index i = 0; i < 4; ++i) sorted.push_back(static_cast<int>(idx(i, 0)));
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("simulate is bitwise reproducible and rejects bad methods") {
  TempDir dir("cs_cli_sim");
  const std::string base =
      "simulate --model 1 --p 10 --J 2 --reps 2 --seed 7 --methods bayes,lw "
      "--sizes 40,30,50";
  REQUIRE(run_cli(base + " --out-dir " + (dir / "a")) == 0);
  REQUIRE(run_cli(base + " --out-dir " + (dir / "b")) == 0);
  CHECK(slurp(dir.path / "a/study.csv") == slurp(dir.path / "b/study.csv"));
  CHECK(slurp(dir.path / "a/study_summary.csv") ==
        slurp(dir.path / "b/study_summary.csv"));

  REQUIRE(run_cli(base + " --threads 4 --out-dir " + (dir / "c")) == 0);
  CHECK(slurp(dir.path / "a/study.csv") == slurp(dir.path / "c/study.csv"));

  CHECK(run_cli("simulate --model 1 --p 10 --J 2 --reps 1 --seed 1 "
                "--methods nonsense --out-dir " +
                (dir / "bad")) == 2);

  // bayes rows carry zero Frobenius error.
  std::ifstream study(dir.path / "a/study.csv");
  std::string line;
  std::getline(study, line);  // header
  while (std::getline(study, line)) {
    if (line.find("bayes") != std::string::npos) {
      CHECK(line.find(",0,") != std::string::npos);
    }
  }
}

TEST_CASE("CHARSHRINK_THREADS sets the default without changing results") {
  TempDir dir("cs_cli_env");
  const std::string base =
      "simulate --model 1 --p 8 --J 2 --reps 2 --seed 5 --methods bayes "
      "--sizes 30,20,40";
  REQUIRE(run_cli(base + " --out-dir " + (dir / "plain")) == 0);
  const std::string env_cmd = "CHARSHRINK_THREADS=3 " +
                              std::string(CHARSHRINK_CLI_PATH) + " " + base +
                              " --out-dir " + (dir / "env") +
                              " >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(slurp(dir.path / "plain/study.csv") ==
        slurp(dir.path / "env/study.csv"));
}

TEST_CASE("verify kkt reports a tiny residual at the exact optimum") {
  TempDir dir("cs_cli_kkt");
  write_matrix_csv(dir / "S.csv", DenseMatrix{{2.0, 0.5}, {0.5, 1.0}});
  write_matrix_csv(dir / "I.csv", DenseMatrix::identity(2));
  const Eigen::MatrixXd Sinv =
      Eigen::MatrixXd(DenseMatrix{{2.0, 0.5}, {0.5, 1.0}}.m()).inverse();
  write_matrix_csv(dir / "omega.csv", DenseMatrix(Sinv));

  REQUIRE(run_cli("verify kkt --cov " + (dir / "S.csv") + " --A " +
                  (dir / "I.csv") + " --B " + (dir / "I.csv") +
                  " --lambda 0 --omega " + (dir / "omega.csv") +
                  " --out-dir " + (dir / "out")) == 0);
  const std::string report = slurp(dir.path / "out/kkt.json");
  const auto pos = report.find("\"residual\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::atof(report.c_str() + pos + 12) <= 1e-8);
}

TEST_CASE("verify rate with a constant n list prints slope zero") {
  TempDir dir("cs_cli_rate");
  REQUIRE(run_cli("verify rate --n-list 60,60 --p 5 --reps 2 --seed 5 "
                  "--out-dir " +
                  (dir / "out")) == 0);
  const std::string table = slurp(dir.path / "out/rate.csv");
  CHECK(table.find("slope,0,") != std::string::npos);
}

TEST_CASE("verify xi recovers the diagonal-support closed form") {
  TempDir dir("cs_cli_xi");
  write_matrix_csv(dir / "I.csv", DenseMatrix::identity(4));
  write_matrix_csv(dir / "mask.csv", DenseMatrix::identity(4));
  REQUIRE(run_cli("verify xi --A " + (dir / "I.csv") + " --B " +
                  (dir / "I.csv") + " --support " + (dir / "mask.csv") +
                  " --restarts 5 --seed 2 --out-dir " + (dir / "out")) == 0);
  const std::string doc = slurp(dir.path / "out/xi.json");
  const auto pos = doc.find("\"estimate\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::atof(doc.c_str() + pos + 12) == doctest::Approx(2.0).epsilon(0.01));
}

}  // TEST_SUITE
