#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "offlang/corpus.hpp"
#include "offlang/sparse.hpp"

namespace offlang {

class FeatureSpace;

/// Character n-gram counts. Keys are UTF-8 strings of n scalar values.
using NgramBag = std::unordered_map<std::string, std::uint32_t>;

/// Lowercases ASCII letters, collapses whitespace runs to one space and trims.
std::string normalize(std::string_view text);

/// Counts every contiguous window of n scalar values for n in [n_min, n_max].
NgramBag char_ngrams(std::string_view normalized, int n_min, int n_max);

inline constexpr std::size_t kLinguisticCount = 9;

/// Slot order: token_count, char_count, avg_token_length, punctuation_count,
/// capitalized_token_count, one_char_token_count, url_count, mention_count,
/// discourse_connective_count.
using LinguisticFeatures = std::array<double, kLinguisticCount>;

class ConnectiveLexicon {
 public:
  /// because, but, however, therefore, so, although, since, though,
  /// moreover, thus.
  static ConnectiveLexicon defaults();
  /// One word per line; blank lines and surrounding whitespace ignored.
  static ConnectiveLexicon load(const std::filesystem::path& path);

  explicit ConnectiveLexicon(std::unordered_set<std::string> words) : words_(std::move(words)) {}
  bool contains(std::string_view lowered_word) const { return words_.contains(std::string(lowered_word)); }

 private:
  std::unordered_set<std::string> words_;
};

/// Tokens are whitespace-separated. Connectives are matched case-insensitively
/// after stripping leading and trailing ASCII punctuation from the token.
LinguisticFeatures linguistic_features(std::string_view text,
                                       const ConnectiveLexicon& connectives = ConnectiveLexicon::defaults());

/// Non-overlapping left-to-right matches of the Potts emoticon pattern.
std::size_t emoticon_count(std::string_view text);

struct EmojiScores {
  double p_positive = 0.0;
  double p_negative = 0.0;
  double sentiment = 0.0;
};

class EmojiLexicon {
 public:
  EmojiLexicon() = default;
  explicit EmojiLexicon(std::unordered_map<char32_t, EmojiScores> entries) : entries_(std::move(entries)) {}

  /// CSV rows `codepoint_hex,p_negative,p_neutral,p_positive,sentiment_score`.
  /// A first line whose first field is not hexadecimal is treated as a header.
  static EmojiLexicon load(const std::filesystem::path& path);
  static EmojiLexicon parse(std::istream& in, std::string_view source = "<stream>");

  const EmojiScores* find(char32_t cp) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<char32_t, EmojiScores> entries_;
};

/// Sums (p_positive, p_negative, sentiment) over every scalar value found in
/// the lexicon.
std::array<double, 3> emoji_sentiment(std::string_view text, const EmojiLexicon& lexicon);

struct EntitySpan {
  std::size_t start;  // scalar-value offset, inclusive
  std::size_t end;    // exclusive
  std::string type;   // OntoNotes tag
};

struct EntityAnnotation {
  std::string instance_id;
  std::vector<EntitySpan> spans;
};

/// Sidecar records `id TAB start TAB end TAB type`, any number per id.
class EntityIndex {
 public:
  static EntityIndex load(const std::filesystem::path& path);
  static EntityIndex parse(std::istream& in, std::string_view source = "<stream>");

  /// Annotation for `inst`, with spans checked against its text length.
  /// Instances without records get an empty annotation.
  EntityAnnotation lookup(const Instance& inst) const;

 private:
  std::unordered_map<std::string, std::vector<EntitySpan>> spans_;
};

/// (person, group, other): PERSON; ORG, NORP or GPE; everything else.
/// Unrecognized tags count as other and raise a warning.
std::array<std::size_t, 3> entity_group_counts(const EntityAnnotation& annotation);

enum class FeatureGroup : unsigned { ngram = 1, linguistic = 2, emoticon = 4, emoji = 8, entity = 16 };

struct FeatureConfig {
  unsigned groups = static_cast<unsigned>(FeatureGroup::ngram);
  int n_min = 2;
  int n_max = 7;

  bool has(FeatureGroup g) const { return (groups & static_cast<unsigned>(g)) != 0; }
};

/// Parses a comma-separated group list such as "ngram,linguistic".
unsigned parse_feature_groups(std::string_view list);
std::string format_feature_groups(unsigned groups);

/// Names of the auxiliary slots contributed by each active non-ngram group,
/// in assembly order.
std::vector<std::string> aux_slot_names(unsigned groups);

struct AuxFeatures {
  LinguisticFeatures linguistic{};
  std::size_t emoticon_count = 0;
  std::array<double, 3> emoji_sentiment{};
  std::array<std::size_t, 3> entity_groups{};
};

/// External resources needed by the auxiliary groups. Pointers may be null
/// for groups that are inactive.
struct FeatureResources {
  ConnectiveLexicon connectives = ConnectiveLexicon::defaults();
  const EmojiLexicon* emoji = nullptr;
  const EntityIndex* entities = nullptr;
};

/// Computes the auxiliary features of the active groups; inactive groups are
/// left zero. Throws if an active group lacks its resource.
AuxFeatures compute_aux(const Instance& instance, const FeatureConfig& config, const FeatureResources& resources);

/// Builds the model input: selected n-gram counts, then active aux slots, then
/// the bias coordinate (1.0). Zero values are omitted.
SparseVector assemble(const Instance& instance, const FeatureSpace& space, const AuxFeatures& aux,
                      const FeatureConfig& config);

}  // namespace offlang
