#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "offlang/corpus.hpp"

namespace offlang {

/// Rows are gold labels, columns are predictions, both in `classes` order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);

  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::uint64_t at(std::size_t gold, std::size_t predicted) const { return cells_[gold * size() + predicted]; }
  std::uint64_t& at(std::size_t gold, std::size_t predicted) { return cells_[gold * size() + predicted]; }
  std::size_t index_of(std::string_view label) const;
  std::uint64_t total() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> classes_;
  std::vector<std::uint64_t> cells_;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  std::vector<ClassScores> per_class;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Precision, recall and F1 per class with zero denominators giving 0; macro
/// F1 averages over every class, including ones never seen or predicted.
EvalReport report_from_confusion(ConfusionMatrix confusion);

using PredictionMap = std::unordered_map<std::string, std::string>;

PredictionMap to_prediction_map(const std::vector<std::pair<std::string, std::string>>& rows);

/// Scores predictions against a labeled corpus. Every gold id needs a
/// prediction; extra ids are ignored.
EvalReport evaluate(const Corpus& gold, const PredictionMap& predictions);

/// evaluate() with every prediction equal to `label`.
EvalReport constant_baseline(const Corpus& gold, std::string_view label);

/// Relabels predicted columns: the count predicted as p moves to column
/// mapping[p]. `mapping` must be a bijection on the class set; classes it does
/// not mention map to themselves.
ConfusionMatrix permute_labels(const ConfusionMatrix& confusion, const std::map<std::string, std::string>& mapping);

/// Parses "OFF=NOT,NOT=OFF".
std::map<std::string, std::string> parse_label_mapping(std::string_view text);

/// Key-value lines: accuracy, macro_f1, per-class metrics, one confusion row
/// per line. Values use four decimals.
void write_report_kv(std::ostream& out, const EvalReport& report);
/// Aligned table for reading.
void write_report_text(std::ostream& out, const EvalReport& report);

}  // namespace offlang
