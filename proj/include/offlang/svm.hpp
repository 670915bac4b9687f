#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlang/sparse.hpp"

namespace offlang {

struct SvmConfig {
  double C = 0.1;
  /// Stop once primal - dual <= tolerance * (1 + |primal|).
  double tolerance = 1e-6;
  int max_epochs = 1000;
  std::uint64_t seed = 1;
  /// Visit coordinates in a freshly shuffled order every epoch. When false
  /// the order is 0..n-1.
  bool shuffle = true;

  void validate() const;
};

/// Primal L2-regularized squared-hinge objective
///   0.5 ||w||^2 + C * sum_i max(0, 1 - y_i <w, x_i>)^2
/// with y_i in {-1, +1}.
double objective(std::span<const double> w, const SparseMatrix& x, std::span<const int> y, double C);

struct BinaryTrainResult {
  std::vector<double> weights;
  int epochs = 0;
  bool converged = false;
  double primal = 0.0;
  /// Dual value (a lower bound on the primal optimum).
  double dual = 0.0;
  /// Minimized dual objective 0.5 a'(Q + I/(2C)) a - sum(a) after each epoch.
  std::vector<double> dual_objective_history;
  std::vector<double> primal_history;

  double gap() const { return primal - dual; }
};

/// Dual coordinate descent for the L2-loss SVM. A bias, if wanted, must be
/// present as a constant feature column.
BinaryTrainResult train_binary(const SparseMatrix& x, std::span<const int> y, const SvmConfig& config);

class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(std::vector<std::string> classes, std::vector<std::vector<double>> weights, SvmConfig config,
           std::string space_fingerprint);

  const std::vector<std::string>& classes() const { return classes_; }
  /// One vector for binary models (positive = classes()[0]), else one per class.
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const SvmConfig& config() const { return config_; }
  const std::string& space_fingerprint() const { return fingerprint_; }
  std::size_t dimension() const { return weights_.empty() ? 0 : weights_.front().size(); }

  /// Decision value per class, in class order.
  std::vector<double> scores(const SparseVector& x) const;

  void write(std::ostream& out) const;
  static SvmModel read(std::istream& in, std::string_view source = "<stream>");
  void save(const std::filesystem::path& path) const;
  static SvmModel load(const std::filesystem::path& path);

 private:
  std::vector<std::string> classes_;
  std::vector<std::vector<double>> weights_;
  SvmConfig config_;
  std::string fingerprint_;
};

/// One-vs-rest training. `labels` are indices into `classes`; every class must
/// occur. Two classes train a single problem with classes[0] as +1.
SvmModel train_ovr(const SparseMatrix& x, std::span<const int> labels, std::vector<std::string> classes,
                   const SvmConfig& config, std::string space_fingerprint, unsigned threads = 1);

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> scores;
};

/// Argmax over class scores; exact ties go to the earlier class. Throws when
/// `space_fingerprint` differs from the model's.
Prediction predict(const SvmModel& model, std::string_view space_fingerprint, const SparseVector& x);

}  // namespace offlang
