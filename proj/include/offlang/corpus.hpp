#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace offlang {

/// OffensEval subtasks: A = offensive or not, B = targeted or untargeted,
/// C = target type.
enum class Task { A, B, C };

enum class OffenseLabel { OFF, NOT };
enum class TargetingLabel { TIN, UNT };
enum class TargetLabel { IND, GRP, OTH };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

std::string_view to_string(OffenseLabel label);
std::string_view to_string(TargetingLabel label);
std::string_view to_string(TargetLabel label);

/// Canonical class order per task. Model weight rows, confusion matrices and
/// tie-breaking all follow this order.
std::span<const std::string_view> task_classes(Task task);

/// Index of `label` in task_classes(task), or nullopt if it is not a class of
/// that task.
std::optional<std::size_t> class_index(Task task, std::string_view label);

struct Instance {
  std::string id;
  std::string text;
  std::optional<OffenseLabel> label_a;
  std::optional<TargetingLabel> label_b;
  std::optional<TargetLabel> label_c;

  /// Gold label for `task` as its string form, if present.
  std::optional<std::string_view> label(Task task) const;
};

class Corpus {
 public:
  Corpus() = default;
  /// Validates ids, texts, label hierarchy and per-task labeling. Throws
  /// offlang::Error on violation.
  Corpus(Task task, std::vector<Instance> instances);

  Task task() const { return task_; }
  /// True when every instance carries the gold label of task(). An empty
  /// corpus counts as labeled.
  bool labeled() const { return labeled_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const { return instances_; }
  auto begin() const { return instances_.begin(); }
  auto end() const { return instances_.end(); }

  /// Gold class index (into task_classes) per instance. Throws if unlabeled.
  std::vector<int> label_indices() const;

 private:
  Task task_ = Task::A;
  std::vector<Instance> instances_;
  bool labeled_ = true;
};

/// Parses OLID tab-separated data. Accepts the five-column layout
/// (id, tweet, subtask_a, subtask_b, subtask_c) and the two-column test layout
/// (id, tweet); the first line is skipped as a header when its first field is
/// "id". "NULL" marks an absent label.
Corpus parse_olid(std::istream& in, Task task, std::string_view source = "<stream>");
Corpus parse_olid(const std::filesystem::path& path, Task task);

/// Writes the five-column layout with header. Texts containing tab, CR or LF
/// cannot be represented and raise an error.
void write_olid(std::ostream& out, const Corpus& corpus);

/// Counts per class of the corpus task, keyed by label, including zero
/// counts for absent classes.
std::map<std::string, std::size_t> class_distribution(const Corpus& corpus);

/// Stratified, seeded split. Each class contributes round(n_c * fraction)
/// instances to the held-out part and must keep at least one instance on each
/// side. Both parts preserve input order.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double held_out_fraction, std::uint64_t seed);

/// Prediction-exchange format: `id,label` per line, no header.
std::vector<std::pair<std::string, std::string>> read_predictions(std::istream& in,
                                                                  std::string_view source = "<stream>");
std::vector<std::pair<std::string, std::string>> read_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, std::span<const std::pair<std::string, std::string>> rows);

}  // namespace offlang
