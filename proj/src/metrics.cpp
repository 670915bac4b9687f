#include "offlang/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "offlang/diagnostics.hpp"

namespace offlang {
namespace {

std::vector<std::string> corpus_classes(const Corpus& corpus) {
  const auto names = task_classes(corpus.task());
  return {names.begin(), names.end()};
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)), cells_(classes_.size() * classes_.size(), 0) {
  if (classes_.empty()) throw Error("confusion matrix needs at least one class");
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error("unknown label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - classes_.begin());
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0}); }

EvalReport report_from_confusion(ConfusionMatrix confusion) {
  const std::size_t k = confusion.size();
  EvalReport report{std::move(confusion), {}, 0.0, 0.0};
  const auto& cm = report.confusion;
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t gold = 0, predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      gold += cm.at(c, j);
      predicted += cm.at(j, c);
    }
    const auto tp = static_cast<double>(cm.at(c, c));
    trace += cm.at(c, c);
    ClassScores s;
    s.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    s.recall = gold ? tp / static_cast<double>(gold) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    report.macro_f1 += s.f1;
    report.per_class.push_back(s);
  }
  report.macro_f1 /= static_cast<double>(k);
  const auto total = cm.total();
  report.accuracy = total ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
  return report;
}

PredictionMap to_prediction_map(const std::vector<std::pair<std::string, std::string>>& rows) {
  PredictionMap map;
  map.reserve(rows.size());
  for (const auto& [id, label] : rows) {
    if (!map.emplace(id, label).second) throw Error("duplicate prediction for id '" + id + "'");
  }
  return map;
}

EvalReport evaluate(const Corpus& gold, const PredictionMap& predictions) {
  if (!gold.labeled()) throw Error("gold corpus is unlabeled for task " + std::string(to_string(gold.task())));
  ConfusionMatrix cm(corpus_classes(gold));
  std::vector<std::string_view> missing;
  for (const auto& inst : gold) {
    const auto it = predictions.find(inst.id);
    if (it == predictions.end()) {
      missing.push_back(inst.id);
      continue;
    }
    const auto predicted = class_index(gold.task(), it->second);
    if (!predicted) {
      throw Error("prediction for id '" + inst.id + "' has unknown label '" + it->second + "' for task " +
                  std::string(to_string(gold.task())));
    }
    ++cm.at(*class_index(gold.task(), *inst.label(gold.task())), *predicted);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      if (i) list += ", ";
      list += missing[i];
    }
    if (missing.size() > 20) list += ", ...";
    throw Error(std::to_string(missing.size()) + " gold id(s) have no prediction: " + list);
  }
  return report_from_confusion(std::move(cm));
}

EvalReport constant_baseline(const Corpus& gold, std::string_view label) {
  if (!class_index(gold.task(), label)) {
    throw Error("'" + std::string(label) + "' is not a class of task " + std::string(to_string(gold.task())));
  }
  PredictionMap predictions;
  predictions.reserve(gold.size());
  for (const auto& inst : gold) predictions.emplace(inst.id, std::string(label));
  return evaluate(gold, predictions);
}

ConfusionMatrix permute_labels(const ConfusionMatrix& confusion, const std::map<std::string, std::string>& mapping) {
  const std::size_t k = confusion.size();
  std::vector<std::size_t> target(k);
  std::iota(target.begin(), target.end(), 0);
  for (const auto& [from, to] : mapping) target[confusion.index_of(from)] = confusion.index_of(to);
  if (std::set<std::size_t>(target.begin(), target.end()).size() != k) {
    throw Error("label mapping is not a bijection on the class set");
  }
  ConfusionMatrix out(confusion.classes());
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t p = 0; p < k; ++p) out.at(g, target[p]) += confusion.at(g, p);
  }
  return out;
}

std::map<std::string, std::string> parse_label_mapping(std::string_view text) {
  std::map<std::string, std::string> mapping;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto pair = text.substr(start, end - start);
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == pair.size()) {
      throw Error("malformed label mapping entry '" + std::string(pair) + "' (expected FROM=TO)");
    }
    if (!mapping.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1))).second) {
      throw Error("label '" + std::string(pair.substr(0, eq)) + "' mapped twice");
    }
    start = end + 1;
  }
  return mapping;
}

void write_report_kv(std::ostream& out, const EvalReport& report) {
  const auto& cm = report.confusion;
  out << "instances " << cm.total() << '\n';
  out << "accuracy " << fixed4(report.accuracy) << '\n';
  out << "macro_f1 " << fixed4(report.macro_f1) << '\n';
  for (std::size_t c = 0; c < cm.size(); ++c) {
    const auto& s = report.per_class[c];
    out << "class " << cm.classes()[c] << " precision " << fixed4(s.precision) << " recall " << fixed4(s.recall)
        << " f1 " << fixed4(s.f1) << '\n';
  }
  out << "confusion_classes";
  for (const auto& name : cm.classes()) out << ' ' << name;
  out << '\n';
  for (std::size_t g = 0; g < cm.size(); ++g) {
    out << "confusion " << cm.classes()[g];
    for (std::size_t p = 0; p < cm.size(); ++p) out << ' ' << cm.at(g, p);
    out << '\n';
  }
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  const auto& cm = report.confusion;
  std::size_t width = 9;
  for (const auto& name : cm.classes()) width = std::max(width, name.size() + 2);
  out << std::left << std::setw(static_cast<int>(width)) << "class" << std::right << std::setw(10) << "precision"
      << std::setw(10) << "recall" << std::setw(10) << "F1" << '\n';
  for (std::size_t c = 0; c < cm.size(); ++c) {
    const auto& s = report.per_class[c];
    out << std::left << std::setw(static_cast<int>(width)) << cm.classes()[c] << std::right << std::setw(10)
        << fixed4(s.precision) << std::setw(10) << fixed4(s.recall) << std::setw(10) << fixed4(s.f1) << '\n';
  }
  out << '\n' << "F1 macro  " << fixed4(report.macro_f1) << '\n';
  out << "Accuracy  " << fixed4(report.accuracy) << '\n';
  out << '\n' << std::left << std::setw(static_cast<int>(width)) << "gold\\pred" << std::right;
  for (const auto& name : cm.classes()) out << std::setw(8) << name;
  out << '\n';
  for (std::size_t g = 0; g < cm.size(); ++g) {
    out << std::left << std::setw(static_cast<int>(width)) << cm.classes()[g] << std::right;
    for (std::size_t p = 0; p < cm.size(); ++p) out << std::setw(8) << cm.at(g, p);
    out << '\n';
  }
}

}  // namespace offlang
