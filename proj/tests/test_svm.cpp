#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "offlang/diagnostics.hpp"
#include "offlang/svm.hpp"
#include "oracles.hpp"

using namespace offlang;

namespace {

SparseMatrix dense_rows(std::size_t cols, const std::vector<std::vector<double>>& rows) {
  SparseMatrix m;
  m.cols = cols;
  for (const auto& r : rows) {
    SparseVector v;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] != 0.0) v.push_back({static_cast<std::uint32_t>(j), r[j]});
    }
    m.rows.push_back(std::move(v));
  }
  return m;
}

struct RandomProblem {
  SparseMatrix x;
  std::vector<int> y;
  double C;
};

RandomProblem random_problem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  const std::size_t d = 1 + rng() % 3;
  const std::size_t n = 2 + rng() % 5;
  const double cs[] = {0.01, 0.1, 1.0, 5.0};
  RandomProblem p;
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (auto& v : r) v = (rng() % 5 == 0) ? 0.0 : value(rng);
  }
  p.y.resize(n);
  for (auto& yi : p.y) yi = rng() % 2 ? 1 : -1;
  p.y[0] = 1;
  p.y[1] = -1;
  p.x = dense_rows(d, rows);
  p.C = cs[rng() % 4];
  return p;
}

}  // namespace

TEST_CASE("objective evaluation") {
  const auto x = dense_rows(2, {{2.0, 1.0}, {-1.0, 1.0}, {0.5, 1.0}});
  const std::vector<int> y{1, -1, 1};
  CHECK(objective(std::vector<double>{0.0, 0.0}, x, y, 0.1) == doctest::Approx(0.3));

  const auto single = dense_rows(2, {{2.0, 1.0}});
  const std::vector<int> pos{1};
  // margin 1/3, slack 2/3: 0.5/36 + 0.1 * 4/9
  CHECK(objective(std::vector<double>{1.0 / 6.0, 0.0}, single, pos, 0.1) ==
        doctest::Approx(0.5 / 36.0 + 0.1 * 4.0 / 9.0).epsilon(1e-14));

  const auto separated = dense_rows(1, {{2.0}, {-3.0}});
  const std::vector<int> ys{1, -1};
  CHECK(objective(std::vector<double>{1.0}, separated, ys, 10.0) == doctest::Approx(0.5));
}

TEST_CASE("train_binary matches the 1-D closed form") {
  const auto x = dense_rows(1, {{2.0}, {-2.0}});
  const std::vector<int> y{1, -1};
  const SvmConfig cfg{0.1, 1e-12, 10000, 1, true};
  const auto r = train_binary(x, y, cfg);
  CHECK(r.converged);
  // Stationary point of 0.5 w^2 + 0.2 (1 - 2w)^2.
  CHECK(std::abs(r.weights[0] - 0.8 / 2.6) < 1e-6);
  CHECK(std::abs(r.weights[0] - oracle::one_dimensional_optimum(std::vector<double>{2.0, -2.0}, y, 0.1)) < 1e-6);
}

TEST_CASE("train_binary approaches the hard margin as C grows") {
  const auto x = dense_rows(1, {{1.0}, {-1.0}});
  const std::vector<int> y{1, -1};
  double previous = 0.0;
  for (double C : {1.0, 10.0, 100.0, 1e4}) {
    const auto r = train_binary(x, y, SvmConfig{C, 1e-12, 100000, 3, true});
    const double exact = oracle::one_dimensional_optimum(std::vector<double>{1.0, -1.0}, y, C);
    CHECK(std::abs(r.weights[0] - exact) < 1e-6);
    CHECK(r.weights[0] > previous);
    CHECK(r.weights[0] < 1.0);
    previous = r.weights[0];
  }
  CHECK(previous == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("mirrored data gives zero bias") {
  const auto x = dense_rows(3, {{1.0, 2.0, 1.0}, {-1.0, -2.0, 1.0}, {0.5, -1.0, 1.0}, {-0.5, 1.0, 1.0}});
  const std::vector<int> y{1, -1, 1, -1};
  const auto r = train_binary(x, y, SvmConfig{0.1, 1e-13, 100000, 1, true});
  CHECK(std::abs(r.weights[2]) < 1e-6);
}

TEST_CASE("train_binary rejects degenerate input") {
  const auto x = dense_rows(1, {{1.0}, {2.0}});
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, 1}, SvmConfig{}), Error);
  const auto bad = dense_rows(1, {{std::numeric_limits<double>::quiet_NaN()}, {1.0}});
  CHECK_THROWS_AS(train_binary(bad, std::vector<int>{1, -1}, SvmConfig{}), Error);
  const auto inf = dense_rows(1, {{std::numeric_limits<double>::infinity()}, {1.0}});
  CHECK_THROWS_AS(train_binary(inf, std::vector<int>{1, -1}, SvmConfig{}), Error);
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, -1}, SvmConfig{0.0}), Error);
}

TEST_CASE("solver matches the gradient-descent oracle on random tiny problems") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_problem(rng);
    SvmConfig cfg;
    cfg.C = p.C;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto r = train_binary(p.x, p.y, cfg);
    REQUIRE(r.converged);
    CHECK(r.gap() <= 1e-6 * (1.0 + std::abs(r.primal)));

    // The default stop bounds ||w - w*|| only by sqrt(2 gap); compare
    // coordinates after running to a tight gap.
    SvmConfig tight = cfg;
    tight.tolerance = 1e-12;
    tight.max_epochs = 100000;
    const auto t = train_binary(p.x, p.y, tight);
    REQUIRE(t.converged);
    const auto w_star = oracle::primal_gradient_descent(p.x, p.y, p.C);
    for (std::size_t j = 0; j < w_star.size(); ++j) CHECK(std::abs(t.weights[j] - w_star[j]) < 1e-3);
    for (std::size_t e = 1; e < r.dual_objective_history.size(); ++e) {
      CHECK(r.dual_objective_history[e] <= r.dual_objective_history[e - 1] + 1e-12);
    }
    CHECK(r.primal == doctest::Approx(oracle::primal_objective(r.weights, p.x, p.y, p.C)).epsilon(1e-12));
  }
}

TEST_CASE("example order does not change the converged objective") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_problem(rng);
    SvmConfig cfg;
    cfg.C = p.C;
    cfg.shuffle = false;
    const auto a = train_binary(p.x, p.y, cfg);
    std::vector<std::size_t> perm(p.y.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SparseMatrix px;
    px.cols = p.x.cols;
    std::vector<int> py;
    for (auto i : perm) px.rows.push_back(p.x.rows[i]), py.push_back(p.y[i]);
    const auto b = train_binary(px, py, cfg);
    CHECK(std::abs(a.primal - b.primal) <= cfg.tolerance * (1.0 + std::abs(a.primal)));
  }
}

TEST_CASE("train_binary is deterministic for a seed") {
  std::mt19937_64 rng(6);
  const auto p = random_problem(rng);
  SvmConfig cfg;
  cfg.seed = 77;
  CHECK(train_binary(p.x, p.y, cfg).weights == train_binary(p.x, p.y, cfg).weights);
}

TEST_CASE("one-vs-rest layout") {
  const auto x = dense_rows(3, {{1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0, 0, 1}, {2, 0, 1}, {0, 2, 1}});
  const std::vector<int> two{0, 1, 0, 1, 0, 1};
  const auto binary = train_ovr(x, two, {"OFF", "NOT"}, SvmConfig{}, "fp");
  CHECK(binary.weights().size() == 1);
  for (const auto& row : x.rows) {
    const auto s = binary.scores(row);
    CHECK(s[1] == -s[0]);
  }

  const std::vector<int> three{0, 1, 2, 0, 1, 2};
  const auto multi = train_ovr(x, three, {"GRP", "IND", "OTH"}, SvmConfig{}, "fp", 3);
  CHECK(multi.weights().size() == 3);
  CHECK(multi.dimension() == 3);
  const auto serial = train_ovr(x, three, {"GRP", "IND", "OTH"}, SvmConfig{}, "fp", 1);
  CHECK(serial.weights() == multi.weights());

  const std::vector<int> missing{0, 1, 0, 1, 0, 1};
  CHECK_THROWS_WITH_AS(train_ovr(x, missing, {"GRP", "IND", "OTH"}, SvmConfig{}, "fp"), doctest::Contains("OTH"),
                       Error);
}

TEST_CASE("predict decision rule") {
  const SvmModel zero({"GRP", "IND", "OTH"}, {{0.0}, {0.0}, {0.0}}, SvmConfig{}, "fp");
  CHECK(predict(zero, "fp", SparseVector{{0, 3.0}}).label == "GRP");

  const SvmModel binary({"OFF", "NOT"}, {{0.5}}, SvmConfig{}, "fp");
  CHECK(predict(binary, "fp", SparseVector{{0, 1.0}}).label == "OFF");
  CHECK(predict(binary, "fp", SparseVector{{0, -1.0}}).label == "NOT");

  const SvmModel three({"GRP", "IND", "OTH"}, {{0.2}, {0.9}, {-0.1}}, SvmConfig{}, "fp");
  const auto p = predict(three, "fp", SparseVector{{0, 1.0}});
  CHECK(p.label == "IND");
  CHECK(p.scores == std::vector<double>{0.2, 0.9, -0.1});
  CHECK(predict(three, "fp", SparseVector{{0, 1.0}}).scores == p.scores);

  CHECK_THROWS_WITH_AS(predict(three, "other", SparseVector{{0, 1.0}}), doctest::Contains("fingerprint"), Error);
  CHECK_THROWS_AS(predict(three, "fp", SparseVector{{5, 1.0}}), Error);
}

TEST_CASE("model file round-trips weights exactly") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + rng() % 40;
    const bool binary = trial % 2 == 0;
    std::vector<std::vector<double>> w(binary ? 1 : 3, std::vector<double>(dim));
    for (auto& row : w) {
      for (auto& v : row) v = normal(rng) * std::pow(10.0, static_cast<double>(rng() % 30) - 15.0);
    }
    SvmConfig cfg{0.1 * (trial + 1), 1e-7, 500 + trial, rng(), trial % 3 != 0};
    const SvmModel model(binary ? std::vector<std::string>{"TIN", "UNT"} : std::vector<std::string>{"GRP", "IND", "OTH"},
                         w, cfg, "0123456789abcdef");
    std::ostringstream out;
    model.write(out);
    std::istringstream in(out.str());
    const auto back = SvmModel::read(in);
    CHECK(back.weights() == model.weights());
    CHECK(back.classes() == model.classes());
    CHECK(back.config().C == cfg.C);
    CHECK(back.config().seed == cfg.seed);
    CHECK(back.config().shuffle == cfg.shuffle);
    CHECK(back.config().max_epochs == cfg.max_epochs);
    CHECK(back.space_fingerprint() == model.space_fingerprint());
    std::ostringstream again;
    back.write(again);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("model file header and layout") {
  const SvmModel model({"GRP", "IND", "OTH"}, {{0.5, -1.0}, {0.0, 2.0}, {1e-300, 3.0}}, SvmConfig{}, "abc");
  std::ostringstream out;
  model.write(out);
  CHECK(out.str() ==
        "offlang-svm v1\nclasses GRP IND OTH\nconfig C=0.1 tolerance=1e-06 max_epochs=1000 seed=1 shuffle=1\n"
        "space abc\n0.5 -1\n0 2\n1e-300 3\n");
  std::istringstream bad("offlang-svm v2\n");
  CHECK_THROWS_AS(SvmModel::read(bad), Error);
  std::istringstream short_rows("offlang-svm v1\nclasses GRP IND OTH\nconfig C=0.1\nspace abc\n1 2\n1 2\n");
  CHECK_THROWS_AS(SvmModel::read(short_rows), Error);
}
