#include "offlang/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "offlang/diagnostics.hpp"
#include "offlang/random.hpp"

namespace offlang {
namespace {

constexpr std::string_view kModelMagic = "offlang-svm v1";

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool parse_double(std::string_view s, double& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

void check_problem(const SparseMatrix& x, std::span<const int> y) {
  if (x.size() != y.size()) throw Error("design matrix and label vector differ in length");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1) {
      pos = true;
    } else if (label == -1) {
      neg = true;
    } else {
      throw Error("binary labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw Error("binary training needs at least one example of each sign");
  for (const auto& row : x.rows) {
    for (const auto& e : row) {
      if (!std::isfinite(e.value)) throw Error("non-finite feature value in training data");
      if (e.index >= x.cols) throw Error("feature index outside the design matrix");
    }
  }
}

}  // namespace

void SvmConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error("SVM C must be a positive finite number");
  if (!(tolerance > 0.0)) throw Error("SVM tolerance must be positive");
  if (max_epochs < 1) throw Error("SVM max_epochs must be at least 1");
}

double objective(std::span<const double> w, const SparseMatrix& x, std::span<const int> y, double C) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double slack = 1.0 - y[i] * dot(w, x.rows[i]);
    if (slack > 0.0) loss += slack * slack;
  }
  const double reg = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return 0.5 * reg + C * loss;
}

BinaryTrainResult train_binary(const SparseMatrix& x, std::span<const int> y, const SvmConfig& config) {
  config.validate();
  check_problem(x, y);

  const std::size_t n = x.size();
  // Squared hinge adds 1/(2C) to the diagonal of the dual Hessian and leaves
  // the dual variables unbounded above.
  const double diag = 0.5 / config.C;

  BinaryTrainResult result;
  result.weights.assign(x.cols, 0.0);
  auto& w = result.weights;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = squared_norm(x.rows[i]) + diag;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.shuffle) seeded_shuffle(std::span(order), rng);
    for (std::size_t i : order) {
      const auto& row = x.rows[i];
      const double yi = y[i];
      const double grad = yi * dot(w, row) - 1.0 + diag * alpha[i];
      const double updated = std::max(alpha[i] - grad / qd[i], 0.0);
      const double delta = (updated - alpha[i]) * yi;
      if (delta != 0.0) {
        for (const auto& e : row) w[e.index] += delta * e.value;
        alpha[i] = updated;
      }
    }

    const double ww = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    double alpha_sum = 0.0, alpha_sq = 0.0;
    for (double a : alpha) {
      alpha_sum += a;
      alpha_sq += a * a;
    }
    // Dual maximand: sum(a) - 0.5||w||^2 - sum(a^2)/(4C).
    result.dual = alpha_sum - 0.5 * ww - 0.5 * diag * alpha_sq;
    result.primal = objective(w, x, y, config.C);
    result.dual_objective_history.push_back(-result.dual);
    result.primal_history.push_back(result.primal);
    result.epochs = epoch;
    if (result.primal - result.dual <= config.tolerance * (1.0 + std::abs(result.primal))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

SvmModel::SvmModel(std::vector<std::string> classes, std::vector<std::vector<double>> weights, SvmConfig config,
                   std::string space_fingerprint)
    : classes_(std::move(classes)),
      weights_(std::move(weights)),
      config_(config),
      fingerprint_(std::move(space_fingerprint)) {
  if (classes_.size() < 2) throw Error("a model needs at least two classes");
  const std::size_t expected = classes_.size() == 2 ? 1 : classes_.size();
  if (weights_.size() != expected) {
    throw Error("model with " + std::to_string(classes_.size()) + " classes needs " + std::to_string(expected) +
                " weight vectors, got " + std::to_string(weights_.size()));
  }
  for (const auto& wv : weights_) {
    if (wv.size() != weights_.front().size()) throw Error("weight vectors differ in length");
  }
}

std::vector<double> SvmModel::scores(const SparseVector& x) const {
  for (const auto& e : x) {
    if (e.index >= dimension()) throw Error("feature index beyond model dimension");
  }
  if (weights_.size() == 1) {
    const double s = dot(weights_.front(), x);
    return {s, -s};
  }
  std::vector<double> out;
  out.reserve(weights_.size());
  for (const auto& wv : weights_) out.push_back(dot(wv, x));
  return out;
}

void SvmModel::write(std::ostream& out) const {
  out << kModelMagic << '\n';
  out << "classes";
  for (const auto& c : classes_) out << ' ' << c;
  out << '\n';
  out << "config C=" << format_double(config_.C) << " tolerance=" << format_double(config_.tolerance)
      << " max_epochs=" << config_.max_epochs << " seed=" << config_.seed << " shuffle=" << (config_.shuffle ? 1 : 0)
      << '\n';
  out << "space " << fingerprint_ << '\n';
  for (const auto& wv : weights_) {
    for (std::size_t j = 0; j < wv.size(); ++j) {
      if (j) out << ' ';
      out << format_double(wv[j]);
    }
    out << '\n';
  }
}

SvmModel SvmModel::read(std::istream& in, std::string_view source) {
  std::size_t line_no = 0;
  std::string line;
  const auto fail = [&](const std::string& what) {
    return Error(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  const auto next = [&](std::string_view expect_prefix) {
    ++line_no;
    if (!std::getline(in, line)) throw fail("unexpected end of model file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!expect_prefix.empty() && !line.starts_with(expect_prefix)) {
      throw fail("expected line starting with '" + std::string(expect_prefix) + "'");
    }
    return split_spaces(line);
  };

  next(kModelMagic);
  if (line != kModelMagic) throw fail("unsupported model header '" + line + "'");

  auto fields = next("classes ");
  std::vector<std::string> classes(fields.begin() + 1, fields.end());

  SvmConfig config;
  fields = next("config ");
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw fail("malformed config entry");
    const auto key = fields[i].substr(0, eq);
    const auto value = fields[i].substr(eq + 1);
    double v = 0.0;
    if (!parse_double(value, v)) throw fail("malformed value for '" + std::string(key) + "'");
    if (key == "C") {
      config.C = v;
    } else if (key == "tolerance") {
      config.tolerance = v;
    } else if (key == "max_epochs") {
      config.max_epochs = static_cast<int>(v);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto r = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (r.ec != std::errc{}) throw fail("malformed seed");
      config.seed = seed;
    } else if (key == "shuffle") {
      config.shuffle = v != 0.0;
    } else {
      throw fail("unknown config key '" + std::string(key) + "'");
    }
  }

  fields = next("space ");
  if (fields.size() != 2) throw fail("malformed space fingerprint line");
  std::string fingerprint(fields[1]);

  const std::size_t rows = classes.size() == 2 ? 1 : classes.size();
  std::vector<std::vector<double>> weights;
  for (std::size_t r = 0; r < rows; ++r) {
    fields = next("");
    std::vector<double> wv;
    wv.reserve(fields.size());
    for (auto f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) throw fail("malformed weight value '" + std::string(f) + "'");
      wv.push_back(v);
    }
    weights.push_back(std::move(wv));
  }
  try {
    return SvmModel(std::move(classes), std::move(weights), config, std::move(fingerprint));
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

void SvmModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  write(out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

SvmModel SvmModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  return read(in, path.string());
}

SvmModel train_ovr(const SparseMatrix& x, std::span<const int> labels, std::vector<std::string> classes,
                   const SvmConfig& config, std::string space_fingerprint, unsigned threads) {
  config.validate();
  if (classes.size() < 2) throw Error("one-vs-rest training needs at least two classes");
  if (labels.size() != x.size()) throw Error("design matrix and label vector differ in length");
  std::vector<std::size_t> counts(classes.size(), 0);
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes.size()) throw Error("label index out of range");
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (counts[c] == 0) throw Error("class " + classes[c] + " is absent from the training labels");
  }

  const std::size_t problems = classes.size() == 2 ? 1 : classes.size();
  std::vector<BinaryTrainResult> results(problems);
  const auto solve = [&](std::size_t c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = static_cast<std::size_t>(labels[i]) == c ? 1 : -1;
    results[c] = train_binary(x, y, config);
  };
  if (threads > 1 && problems > 1) {
    std::vector<std::jthread> pool;
    for (std::size_t c = 0; c < problems; ++c) pool.emplace_back(solve, c);
  } else {
    for (std::size_t c = 0; c < problems; ++c) solve(c);
  }

  std::vector<std::vector<double>> weights;
  for (std::size_t c = 0; c < problems; ++c) {
    if (!results[c].converged) {
      warn("solver for class " + classes[c] + " stopped at max_epochs=" + std::to_string(config.max_epochs) +
           " with duality gap " + format_double(results[c].gap()));
    }
    weights.push_back(std::move(results[c].weights));
  }
  return SvmModel(std::move(classes), std::move(weights), config, std::move(space_fingerprint));
}

Prediction predict(const SvmModel& model, std::string_view space_fingerprint, const SparseVector& x) {
  if (space_fingerprint != model.space_fingerprint()) {
    throw Error("feature space fingerprint " + std::string(space_fingerprint) + " does not match model (" +
                model.space_fingerprint() + ")");
  }
  Prediction p;
  p.scores = model.scores(x);
  for (std::size_t c = 1; c < p.scores.size(); ++c) {
    if (p.scores[c] > p.scores[p.class_index]) p.class_index = c;
  }
  p.label = model.classes()[p.class_index];
  return p;
}

}  // namespace offlang
