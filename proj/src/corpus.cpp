#include "offlang/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "offlang/diagnostics.hpp"
#include "offlang/random.hpp"

namespace offlang {
namespace {

constexpr std::array<std::string_view, 2> kClassesA{"OFF", "NOT"};
constexpr std::array<std::string_view, 2> kClassesB{"TIN", "UNT"};
constexpr std::array<std::string_view, 3> kClassesC{"GRP", "IND", "OTH"};

constexpr std::string_view kNull = "NULL";

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string located(std::string_view source, std::size_t line, std::string_view what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  return os.str();
}

template <typename E>
std::optional<E> parse_label(std::string_view field, std::string_view column, std::string_view source,
                             std::size_t line, std::span<const std::pair<std::string_view, E>> table) {
  if (field == kNull || field.empty()) return std::nullopt;
  for (const auto& [name, value] : table) {
    if (name == field) return value;
  }
  throw Error(located(source, line, "unknown " + std::string(column) + " label '" + std::string(field) + "'"));
}

constexpr std::array<std::pair<std::string_view, OffenseLabel>, 2> kOffense{
    {{"OFF", OffenseLabel::OFF}, {"NOT", OffenseLabel::NOT}}};
constexpr std::array<std::pair<std::string_view, TargetingLabel>, 2> kTargeting{
    {{"TIN", TargetingLabel::TIN}, {"UNT", TargetingLabel::UNT}}};
constexpr std::array<std::pair<std::string_view, TargetLabel>, 3> kTarget{
    {{"IND", TargetLabel::IND}, {"GRP", TargetLabel::GRP}, {"OTH", TargetLabel::OTH}}};

// Returns an empty string when the instance is consistent.
std::string hierarchy_violation(const Instance& inst) {
  if (inst.label_c && inst.label_b && *inst.label_b != TargetingLabel::TIN) {
    return "subtask_c label '" + std::string(to_string(*inst.label_c)) + "' requires subtask_b TIN, got " +
           std::string(to_string(*inst.label_b));
  }
  if (inst.label_b && inst.label_a && *inst.label_a != OffenseLabel::OFF) {
    return "subtask_b label '" + std::string(to_string(*inst.label_b)) + "' requires subtask_a OFF, got " +
           std::string(to_string(*inst.label_a));
  }
  return {};
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::A: return "A";
    case Task::B: return "B";
    case Task::C: return "C";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  if (text == "A" || text == "a") return Task::A;
  if (text == "B" || text == "b") return Task::B;
  if (text == "C" || text == "c") return Task::C;
  throw Error("unknown task '" + std::string(text) + "' (expected A, B or C)");
}

std::string_view to_string(OffenseLabel label) { return label == OffenseLabel::OFF ? "OFF" : "NOT"; }
std::string_view to_string(TargetingLabel label) { return label == TargetingLabel::TIN ? "TIN" : "UNT"; }
std::string_view to_string(TargetLabel label) {
  switch (label) {
    case TargetLabel::IND: return "IND";
    case TargetLabel::GRP: return "GRP";
    case TargetLabel::OTH: return "OTH";
  }
  return "?";
}

std::span<const std::string_view> task_classes(Task task) {
  switch (task) {
    case Task::A: return kClassesA;
    case Task::B: return kClassesB;
    case Task::C: return kClassesC;
  }
  return {};
}

std::optional<std::size_t> class_index(Task task, std::string_view label) {
  const auto classes = task_classes(task);
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

std::optional<std::string_view> Instance::label(Task task) const {
  switch (task) {
    case Task::A:
      if (label_a) return to_string(*label_a);
      break;
    case Task::B:
      if (label_b) return to_string(*label_b);
      break;
    case Task::C:
      if (label_c) return to_string(*label_c);
      break;
  }
  return std::nullopt;
}

Corpus::Corpus(Task task, std::vector<Instance> instances) : task_(task), instances_(std::move(instances)) {
  std::unordered_set<std::string_view> ids;
  std::size_t with_label = 0;
  for (const auto& inst : instances_) {
    if (inst.id.empty()) throw Error("instance with empty id");
    if (inst.text.empty()) throw Error("instance '" + inst.id + "' has empty text");
    if (!ids.insert(inst.id).second) throw Error("duplicate instance id '" + inst.id + "'");
    if (auto v = hierarchy_violation(inst); !v.empty()) throw Error("instance '" + inst.id + "': " + v);
    if (inst.label(task_)) ++with_label;
  }
  if (with_label != 0 && with_label != instances_.size()) {
    throw Error("corpus for task " + std::string(to_string(task_)) + " is partially labeled (" +
                std::to_string(with_label) + " of " + std::to_string(instances_.size()) + " instances)");
  }
  labeled_ = with_label == instances_.size();
}

std::vector<int> Corpus::label_indices() const {
  if (!labeled_) throw Error("corpus is unlabeled for task " + std::string(to_string(task_)));
  std::vector<int> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) {
    out.push_back(static_cast<int>(*class_index(task_, *inst.label(task_))));
  }
  return out;
}

Corpus parse_olid(std::istream& in, Task task, std::string_view source) {
  std::vector<Instance> instances;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::size_t labeled_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (line_no == 1 && fields.front() == "id") {
      if (fields.size() != 2 && fields.size() != 5) {
        throw Error(located(source, line_no, "header has " + std::to_string(fields.size()) +
                                                 " columns, expected 2 or 5"));
      }
      columns = fields.size();
      continue;
    }
    if (columns == 0) {
      if (fields.size() != 2 && fields.size() != 5) {
        throw Error(located(source, line_no, "expected 2 or 5 tab-separated columns, got " +
                                                 std::to_string(fields.size())));
      }
      columns = fields.size();
    }
    if (fields.size() != columns) {
      throw Error(located(source, line_no, "expected " + std::to_string(columns) +
                                               " tab-separated columns, got " + std::to_string(fields.size())));
    }
    Instance inst;
    inst.id = std::string(fields[0]);
    inst.text = std::string(fields[1]);
    if (inst.id.empty()) throw Error(located(source, line_no, "empty id"));
    if (inst.text.empty()) throw Error(located(source, line_no, "empty tweet text"));
    if (columns == 5) {
      inst.label_a = parse_label<OffenseLabel>(fields[2], "subtask_a", source, line_no, kOffense);
      inst.label_b = parse_label<TargetingLabel>(fields[3], "subtask_b", source, line_no, kTargeting);
      inst.label_c = parse_label<TargetLabel>(fields[4], "subtask_c", source, line_no, kTarget);
    }
    if (auto v = hierarchy_violation(inst); !v.empty()) throw Error(located(source, line_no, v));
    if (!ids.insert(inst.id).second) throw Error(located(source, line_no, "duplicate id '" + inst.id + "'"));
    if (inst.label(task)) ++labeled_rows;
    instances.push_back(std::move(inst));
  }
  if (in.bad()) throw Error(std::string(source) + ": read error");
  if (instances.empty()) warn(std::string(source) + ": no instances");

  // Training files carry all three subtasks; rows without the requested label
  // (e.g. NOT tweets for subtask C) are outside that task and dropped.
  if (labeled_rows != 0 && labeled_rows != instances.size()) {
    std::erase_if(instances, [task](const Instance& i) { return !i.label(task); });
  }
  return Corpus(task, std::move(instances));
}

Corpus parse_olid(const std::filesystem::path& path, Task task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return parse_olid(in, task, path.string());
}

void write_olid(std::ostream& out, const Corpus& corpus) {
  out << "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";
  for (const auto& inst : corpus) {
    for (const auto* field : {&inst.id, &inst.text}) {
      if (field->find_first_of("\t\r\n") != std::string::npos) {
        throw Error("instance '" + inst.id + "' contains a tab or line break and cannot be written as TSV");
      }
    }
    out << inst.id << '\t' << inst.text << '\t' << inst.label(Task::A).value_or(kNull) << '\t'
        << inst.label(Task::B).value_or(kNull) << '\t' << inst.label(Task::C).value_or(kNull) << '\n';
  }
}

std::map<std::string, std::size_t> class_distribution(const Corpus& corpus) {
  if (!corpus.labeled()) throw Error("class distribution requested for an unlabeled corpus");
  std::map<std::string, std::size_t> counts;
  for (auto name : task_classes(corpus.task())) counts[std::string(name)] = 0;
  for (const auto& inst : corpus) ++counts[std::string(*inst.label(corpus.task()))];
  return counts;
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double held_out_fraction, std::uint64_t seed) {
  if (!(held_out_fraction > 0.0 && held_out_fraction < 1.0)) {
    throw Error("held-out fraction must lie strictly between 0 and 1");
  }
  const auto labels = corpus.label_indices();
  const auto classes = task_classes(corpus.task());
  std::vector<std::vector<std::size_t>> by_class(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<bool> held(corpus.size(), false);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    const auto take = static_cast<std::size_t>(std::floor(held_out_fraction * static_cast<double>(members.size()) + 0.5));
    if (take == 0 || take >= members.size()) {
      throw Error("class " + std::string(classes[c]) + " has " + std::to_string(members.size()) +
                  " instance(s), too few to stratify at fraction " + std::to_string(held_out_fraction));
    }
    seeded_shuffle(std::span(members), rng);
    for (std::size_t j = 0; j < take; ++j) held[members[j]] = true;
  }

  std::vector<Instance> kept, out;
  for (std::size_t i = 0; i < corpus.size(); ++i) (held[i] ? out : kept).push_back(corpus[i]);
  return {Corpus(corpus.task(), std::move(kept)), Corpus(corpus.task(), std::move(out))};
}

std::vector<std::pair<std::string, std::string>> read_predictions(std::istream& in, std::string_view source) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(located(source, line_no, "expected 'id,label'"));
    }
    rows.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return rows;
}

std::vector<std::pair<std::string, std::string>> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_predictions(in, path.string());
}

void write_predictions(std::ostream& out, std::span<const std::pair<std::string, std::string>> rows) {
  for (const auto& [id, label] : rows) out << id << ',' << label << '\n';
}

}  // namespace offlang
