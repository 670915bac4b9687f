#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "offlang/features.hpp"

namespace offlang {

/// Frozen, ordered feature layout: n-gram slots, then named auxiliary slots,
/// then the bias slot.
class FeatureSpace {
 public:
  FeatureSpace(std::vector<std::string> ngram_slots, std::vector<std::string> aux_slots);

  const std::vector<std::string>& ngram_slots() const { return ngrams_; }
  const std::vector<std::string>& aux_slots() const { return aux_; }
  std::size_t size() const { return ngrams_.size() + aux_.size() + 1; }
  std::uint32_t bias_index() const { return static_cast<std::uint32_t>(size() - 1); }

  std::optional<std::uint32_t> ngram_index(std::string_view ngram) const;
  std::optional<std::uint32_t> aux_index(std::string_view name) const;

  /// Same n-gram slots with a different auxiliary layout.
  FeatureSpace with_aux(std::vector<std::string> aux_slots) const;

  /// 64-bit FNV-1a of the serialized form, as 16 lowercase hex digits.
  const std::string& fingerprint() const { return fingerprint_; }

  void write(std::ostream& out) const;
  static FeatureSpace read(std::istream& in, std::string_view source = "<stream>");
  void save(const std::filesystem::path& path) const;
  static FeatureSpace load(const std::filesystem::path& path);

 private:
  std::vector<std::string> ngrams_;
  std::vector<std::string> aux_;
  std::unordered_map<std::string, std::uint32_t> ngram_lookup_;
  std::string fingerprint_;
};

/// Sorted document indices containing each n-gram.
using DocumentPresence = std::map<std::string, std::vector<std::uint32_t>>;

/// N-grams with document frequency >= min_df and the documents that contain
/// them (binary presence).
DocumentPresence document_presence(std::span<const NgramBag> bags, int min_df);

/// Expands a posting list into a 0/1 vector over `num_docs` documents.
std::vector<std::uint8_t> presence_bits(std::span<const std::uint32_t> postings, std::size_t num_docs);

/// Shannon entropy in bits of a count histogram (0 log 0 = 0).
double entropy_bits(std::span<const double> counts);

/// H(C) - [P(t) H(C|t) + P(~t) H(C|~t)] in bits. Labels are class indices in
/// [0, num_classes).
double information_gain(std::span<const std::uint8_t> presence, std::span<const int> labels, std::size_t num_classes);

/// Same quantity computed from a posting list.
double information_gain_postings(std::span<const std::uint32_t> postings, std::span<const int> labels,
                                 std::size_t num_classes);

struct IgScore {
  std::string feature;
  double gain = 0.0;
  std::size_t document_frequency = 0;
};

/// Scores every candidate; the result follows the map's key order.
std::vector<IgScore> score_candidates(const DocumentPresence& presence, std::span<const int> labels,
                                      std::size_t num_classes, unsigned threads = 1);

/// Orders by descending gain, then descending document frequency, then
/// ascending n-gram string.
void rank_scores(std::vector<IgScore>& scores);

/// Top-k n-gram slots in rank order (no aux slots). Takes everything, with a
/// warning, when fewer than k candidates exist.
FeatureSpace select_top_k(std::vector<IgScore> scores, int k);

}  // namespace offlang
