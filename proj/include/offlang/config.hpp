#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "offlang/corpus.hpp"
#include "offlang/features.hpp"
#include "offlang/svm.hpp"

namespace offlang {

/// Ordered `key = value` pairs from a config file or flags.
using KeyValues = std::map<std::string, std::string>;

/// Parses line-oriented `key = value` text; `#` starts a comment.
KeyValues parse_key_values(std::istream& in, std::string_view source = "<stream>");
KeyValues load_key_values(const std::filesystem::path& path);

/// Every key a run config understands, in documentation order.
std::span<const std::string_view> config_keys();

/// Built-in copy of a shipped preset (official-a-svm, official-b, official-c).
std::optional<std::string_view> preset_text(std::string_view name);
std::span<const std::string_view> preset_names();

struct RunConfig {
  Task task = Task::A;
  FeatureConfig features;
  int k = 1000;
  int min_df = 2;
  SvmConfig svm;
  /// Fraction of the training data held out for a quick report; 0 disables.
  double holdout = 0.0;
  /// 0 means: OFFLANG_THREADS, else hardware concurrency.
  unsigned threads = 0;

  std::filesystem::path train;
  /// Optional second training file (e.g. the trial set) appended to `train`.
  std::filesystem::path also_train;
  std::filesystem::path eval;
  std::filesystem::path entities;
  std::filesystem::path emoji_lexicon;
  std::filesystem::path connectives;
  std::filesystem::path model;
  std::filesystem::path space;
  std::filesystem::path predictions;

  /// Applies recognized keys; unknown keys and malformed values raise errors
  /// that name the key.
  static RunConfig from_key_values(const KeyValues& values);

  /// Checks cross-field invariants. With `for_training` the training path and
  /// the resources of the active feature groups must be set.
  void validate(bool for_training) const;

  /// `space` when set, else the model path with ".space" appended.
  std::filesystem::path space_path() const;
  unsigned resolved_threads() const;
};

}  // namespace offlang
