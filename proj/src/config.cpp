#include "offlang/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <thread>

#include "offlang/diagnostics.hpp"

namespace offlang {
namespace {

constexpr std::array<std::string_view, 23> kKeys{
    "task",     "groups",      "n_min", "n_max",    "k",        "min_df",        "C",           "tolerance",
    "max_epochs", "seed",      "shuffle", "holdout", "threads", "train",         "also_train",  "eval",
    "entities", "emoji_lexicon", "connectives", "model", "space", "predictions",   "preset"};

constexpr std::string_view kOfficialA = R"(# Subtask A (OFF/NOT) with the character n-gram SVM.
task = A
groups = ngram
n_min = 2
n_max = 7
k = 1000
min_df = 2
C = 0.1
tolerance = 1e-6
max_epochs = 1000
seed = 1
train = data/olid-training-v1.0.tsv
model = official-a-svm.model
space = official-a-svm.space
)";

constexpr std::string_view kOfficialB = R"(# Subtask B (TIN/UNT) with the character n-gram SVM.
task = B
groups = ngram
n_min = 2
n_max = 7
k = 1000
min_df = 2
C = 0.1
tolerance = 1e-6
max_epochs = 1000
seed = 1
train = data/olid-training-v1.0.tsv
model = official-b.model
space = official-b.space
)";

constexpr std::string_view kOfficialC = R"(# Subtask C (IND/GRP/OTH): 1000 information-gain selected character
# 2..7-grams, linear squared-hinge SVM with C = 0.1.
task = C
groups = ngram
n_min = 2
n_max = 7
k = 1000
min_df = 2
C = 0.1
tolerance = 1e-6
max_epochs = 1000
seed = 1
train = data/olid-training-v1.0.tsv
model = official-c.model
space = official-c.space
)";

constexpr std::array<std::string_view, 3> kPresetNames{"official-a-svm", "official-b", "official-c"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T number(std::string_view key, const std::string& text) {
  T value{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw Error("config key '" + std::string(key) + "': malformed value '" + text + "'");
  }
  return value;
}

bool boolean(std::string_view key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw Error("config key '" + std::string(key) + "': expected a boolean, got '" + text + "'");
}

}  // namespace

KeyValues parse_key_values(std::istream& in, std::string_view source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw Error(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    kv[std::string(key)] = std::string(trim(view.substr(eq + 1)));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  return parse_key_values(in, path.string());
}

std::span<const std::string_view> config_keys() { return kKeys; }

std::optional<std::string_view> preset_text(std::string_view name) {
  if (name == "official-a-svm") return kOfficialA;
  if (name == "official-b") return kOfficialB;
  if (name == "official-c") return kOfficialC;
  return std::nullopt;
}

std::span<const std::string_view> preset_names() { return kPresetNames; }

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw Error("unknown config key '" + key + "'");
    }
    try {
      if (key == "task") {
        cfg.task = parse_task(value);
      } else if (key == "groups") {
        cfg.features.groups = parse_feature_groups(value);
      } else if (key == "n_min") {
        cfg.features.n_min = number<int>(key, value);
      } else if (key == "n_max") {
        cfg.features.n_max = number<int>(key, value);
      } else if (key == "k") {
        cfg.k = number<int>(key, value);
      } else if (key == "min_df") {
        cfg.min_df = number<int>(key, value);
      } else if (key == "C") {
        cfg.svm.C = number<double>(key, value);
      } else if (key == "tolerance") {
        cfg.svm.tolerance = number<double>(key, value);
      } else if (key == "max_epochs") {
        cfg.svm.max_epochs = number<int>(key, value);
      } else if (key == "seed") {
        cfg.svm.seed = number<std::uint64_t>(key, value);
      } else if (key == "shuffle") {
        cfg.svm.shuffle = boolean(key, value);
      } else if (key == "holdout") {
        cfg.holdout = number<double>(key, value);
      } else if (key == "threads") {
        cfg.threads = number<unsigned>(key, value);
      } else if (key == "train") {
        cfg.train = value;
      } else if (key == "also_train") {
        cfg.also_train = value;
      } else if (key == "eval") {
        cfg.eval = value;
      } else if (key == "entities") {
        cfg.entities = value;
      } else if (key == "emoji_lexicon") {
        cfg.emoji_lexicon = value;
      } else if (key == "connectives") {
        cfg.connectives = value;
      } else if (key == "model") {
        cfg.model = value;
      } else if (key == "space") {
        cfg.space = value;
      } else if (key == "predictions") {
        cfg.predictions = value;
      }
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.starts_with("config key")) throw;
      throw Error("config key '" + key + "': " + what);
    }
  }
  return cfg;
}

void RunConfig::validate(bool for_training) const {
  if (features.n_min < 1 || features.n_max < features.n_min) {
    throw Error("config keys 'n_min'/'n_max': need 1 <= n_min <= n_max");
  }
  if (k < 1) throw Error("config key 'k': must be at least 1");
  if (min_df < 1) throw Error("config key 'min_df': must be at least 1");
  if (holdout < 0.0 || holdout >= 1.0) throw Error("config key 'holdout': must lie in [0, 1)");
  try {
    svm.validate();
  } catch (const Error& e) {
    throw Error(std::string("config keys 'C'/'tolerance'/'max_epochs': ") + e.what());
  }
  if (features.has(FeatureGroup::emoji) && emoji_lexicon.empty()) {
    throw Error("config key 'emoji_lexicon' is required when the emoji group is active");
  }
  if (features.has(FeatureGroup::entity) && entities.empty()) {
    throw Error("config key 'entities' is required when the entity group is active");
  }
  if (for_training) {
    if (train.empty()) throw Error("config key 'train' is required");
    if (model.empty()) throw Error("config key 'model' is required");
  }
}

std::filesystem::path RunConfig::space_path() const {
  if (!space.empty()) return space;
  auto p = model;
  p += ".space";
  return p;
}

unsigned RunConfig::resolved_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("OFFLANG_THREADS")) {
    unsigned n = 0;
    const std::string_view text(env);
    const auto r = std::from_chars(text.data(), text.data() + text.size(), n);
    if (r.ec == std::errc{} && r.ptr == text.data() + text.size() && n > 0) return n;
    warn("ignoring malformed OFFLANG_THREADS='" + std::string(text) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace offlang
