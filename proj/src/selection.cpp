#include "offlang/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "offlang/diagnostics.hpp"

namespace offlang {
namespace {

constexpr std::string_view kSpaceMagic = "offlang-space v1";

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<std::string> unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) return std::nullopt;
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double ig_from_counts(std::span<const double> present, std::span<const double> totals) {
  double n = 0.0, n_present = 0.0;
  std::vector<double> absent(totals.size());
  for (std::size_t c = 0; c < totals.size(); ++c) {
    n += totals[c];
    n_present += present[c];
    absent[c] = totals[c] - present[c];
  }
  if (n == 0.0) return 0.0;
  const double p_t = n_present / n;
  const double gain = entropy_bits(totals) - p_t * entropy_bits(present) - (1.0 - p_t) * entropy_bits(absent);
  return std::max(gain, 0.0);
}

}  // namespace

FeatureSpace::FeatureSpace(std::vector<std::string> ngram_slots, std::vector<std::string> aux_slots)
    : ngrams_(std::move(ngram_slots)), aux_(std::move(aux_slots)) {
  ngram_lookup_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    if (ngrams_[i].empty()) throw Error("feature space contains an empty n-gram slot");
    if (!ngram_lookup_.emplace(ngrams_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error("duplicate n-gram slot '" + ngrams_[i] + "' in feature space");
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : aux_) {
    if (name.empty() || name.find_first_of("\t\n\\") != std::string::npos) {
      throw Error("invalid auxiliary slot name '" + name + "'");
    }
    if (!seen.insert(name).second) throw Error("duplicate auxiliary slot '" + name + "'");
  }
  std::ostringstream os;
  write(os);
  fingerprint_ = fnv1a_hex(os.str());
}

std::optional<std::uint32_t> FeatureSpace::ngram_index(std::string_view ngram) const {
  const auto it = ngram_lookup_.find(std::string(ngram));
  if (it == ngram_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> FeatureSpace::aux_index(std::string_view name) const {
  const auto it = std::find(aux_.begin(), aux_.end(), name);
  if (it == aux_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(ngrams_.size() + static_cast<std::size_t>(it - aux_.begin()));
}

FeatureSpace FeatureSpace::with_aux(std::vector<std::string> aux_slots) const {
  return FeatureSpace(ngrams_, std::move(aux_slots));
}

void FeatureSpace::write(std::ostream& out) const {
  out << kSpaceMagic << " k=" << ngrams_.size() << '\n';
  std::size_t index = 0;
  for (const auto& g : ngrams_) out << index++ << "\tngram\t" << escape(g) << '\n';
  for (const auto& a : aux_) out << index++ << "\taux\t" << a << '\n';
  out << index << "\tbias\tbias\n";
}

FeatureSpace FeatureSpace::read(std::istream& in, std::string_view source) {
  const auto fail = [&](std::size_t line_no, const std::string& what) -> Error {
    return Error(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kSpaceMagic) ||
      !std::string_view(line).substr(kSpaceMagic.size()).starts_with(" k=")) {
    throw fail(1, "not a feature space file (expected header 'offlang-space v1 k=<K>')");
  }
  std::size_t k = 0;
  {
    const auto digits = std::string_view(line).substr(kSpaceMagic.size() + 3);
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size()) throw fail(1, "malformed k in header");
  }

  std::vector<std::string> ngrams, aux;
  bool saw_bias = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (saw_bias) throw fail(line_no, "slot after bias");
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw fail(line_no, "expected 'index<TAB>kind<TAB>payload'");
    const std::string_view index_text(line.data(), t1);
    const std::string_view kind(line.data() + t1 + 1, t2 - t1 - 1);
    const std::string_view payload(line.data() + t2 + 1, line.size() - t2 - 1);
    std::size_t index = 0;
    const auto r = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
    if (r.ec != std::errc{} || r.ptr != index_text.data() + index_text.size() ||
        index != ngrams.size() + aux.size()) {
      throw fail(line_no, "slot index out of sequence");
    }
    if (kind == "ngram") {
      if (!aux.empty()) throw fail(line_no, "n-gram slot after auxiliary slots");
      auto text = unescape(payload);
      if (!text) throw fail(line_no, "bad escape in n-gram payload");
      ngrams.push_back(std::move(*text));
    } else if (kind == "aux") {
      aux.emplace_back(payload);
    } else if (kind == "bias") {
      saw_bias = true;
    } else {
      throw fail(line_no, "unknown slot kind '" + std::string(kind) + "'");
    }
  }
  if (!saw_bias) throw fail(line_no, "missing bias slot");
  if (ngrams.size() != k) throw fail(1, "header declares k=" + std::to_string(k) + " but file has " +
                                            std::to_string(ngrams.size()) + " n-gram slots");
  return FeatureSpace(std::move(ngrams), std::move(aux));
}

void FeatureSpace::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write feature space '" + path.string() + "'");
  write(out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

FeatureSpace FeatureSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature space '" + path.string() + "'");
  return read(in, path.string());
}

DocumentPresence document_presence(std::span<const NgramBag> bags, int min_df) {
  if (min_df < 1) throw Error("min_df must be at least 1");
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
  for (std::size_t d = 0; d < bags.size(); ++d) {
    for (const auto& [ngram, count] : bags[d]) {
      if (count > 0) postings[ngram].push_back(static_cast<std::uint32_t>(d));
    }
  }
  DocumentPresence out;
  for (auto& [ngram, docs] : postings) {
    if (docs.size() >= static_cast<std::size_t>(min_df)) out.emplace(ngram, std::move(docs));
  }
  return out;
}

std::vector<std::uint8_t> presence_bits(std::span<const std::uint32_t> postings, std::size_t num_docs) {
  std::vector<std::uint8_t> bits(num_docs, 0);
  for (auto d : postings) bits.at(d) = 1;
  return bits;
}

double entropy_bits(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double information_gain(std::span<const std::uint8_t> presence, std::span<const int> labels,
                        std::size_t num_classes) {
  if (presence.size() != labels.size()) throw Error("presence and label vectors differ in length");
  std::vector<double> present(num_classes, 0.0), totals(num_classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= num_classes) throw Error("label index out of range");
    totals[c] += 1.0;
    if (presence[i]) present[c] += 1.0;
  }
  return ig_from_counts(present, totals);
}

double information_gain_postings(std::span<const std::uint32_t> postings, std::span<const int> labels,
                                 std::size_t num_classes) {
  std::vector<double> present(num_classes, 0.0), totals(num_classes, 0.0);
  for (int label : labels) totals[static_cast<std::size_t>(label)] += 1.0;
  for (auto d : postings) present[static_cast<std::size_t>(labels[d])] += 1.0;
  return ig_from_counts(present, totals);
}

std::vector<IgScore> score_candidates(const DocumentPresence& presence, std::span<const int> labels,
                                      std::size_t num_classes, unsigned threads) {
  std::vector<IgScore> scores;
  scores.reserve(presence.size());
  std::vector<const std::vector<std::uint32_t>*> lists;
  lists.reserve(presence.size());
  for (const auto& [ngram, docs] : presence) {
    scores.push_back({ngram, 0.0, docs.size()});
    lists.push_back(&docs);
  }
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(scores.size() / 1024 + 1)));
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) scores[i].gain = information_gain_postings(*lists[i], labels, num_classes);
  };
  if (threads == 1) {
    work(0, scores.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (scores.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < scores.size(); begin += chunk) {
      pool.emplace_back(work, begin, std::min(scores.size(), begin + chunk));
    }
  }
  return scores;
}

void rank_scores(std::vector<IgScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const IgScore& a, const IgScore& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.document_frequency != b.document_frequency) return a.document_frequency > b.document_frequency;
    return a.feature < b.feature;
  });
}

FeatureSpace select_top_k(std::vector<IgScore> scores, int k) {
  if (k <= 0) throw Error("k must be at least 1");
  if (scores.size() < static_cast<std::size_t>(k)) {
    warn("only " + std::to_string(scores.size()) + " candidate n-grams available; selecting all instead of " +
         std::to_string(k));
  }
  rank_scores(scores);
  const auto take = std::min(scores.size(), static_cast<std::size_t>(k));
  std::vector<std::string> slots;
  slots.reserve(take);
  for (std::size_t i = 0; i < take; ++i) slots.push_back(std::move(scores[i].feature));
  return FeatureSpace(std::move(slots), {});
}

}  // namespace offlang
