#include "offlang/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <regex>
#include <sstream>

#include "offlang/diagnostics.hpp"
#include "offlang/selection.hpp"
#include "offlang/utf8.hpp"

namespace offlang {
namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 0x21 && u <= 0x2F) || (u >= 0x3A && u <= 0x40) || (u >= 0x5B && u <= 0x60) ||
         (u >= 0x7B && u <= 0x7E);
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (auto pos = line.find(sep); pos != std::string_view::npos; pos = line.find(sep, start)) {
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  s = trim(s);
  if (s.empty()) return false;
  const char* last = s.data() + s.size();
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(s.data(), last, out);
  } else {
    r = std::from_chars(s.data(), last, out, base);
  }
  return r.ec == std::errc{} && r.ptr == last;
}

std::optional<char32_t> parse_codepoint(std::string_view field) {
  field = trim(field);
  if (field.starts_with("U+") || field.starts_with("u+") || field.starts_with("0x") || field.starts_with("0X")) {
    field.remove_prefix(2);
  }
  std::uint32_t cp = 0;
  if (!parse_number(field, cp, 16) || cp > 0x10FFFF) return std::nullopt;
  return static_cast<char32_t>(cp);
}

const std::regex& emoticon_pattern() {
  // Eyes, optional nose, mouth; or the mirrored form.
  static const std::regex re(
      R"re((?:[<>]?[:;=8][-o*']?[)\](\[dDpP/:}{@|\\]|[)\](\[dDpP/:}{@|\\][-o*']?[:;=8][<>]?))re",
      std::regex::ECMAScript | std::regex::optimize);
  return re;
}

constexpr std::array<std::string_view, 9> kLinguisticSlots{
    "ling.token_count",   "ling.char_count",         "ling.avg_token_length",
    "ling.punctuation",   "ling.capitalized_tokens", "ling.one_char_tokens",
    "ling.url_count",     "ling.mention_count",      "ling.discourse_connectives"};
constexpr std::string_view kEmoticonSlot = "emoticon.count";
constexpr std::array<std::string_view, 3> kEmojiSlots{"emoji.positive", "emoji.negative", "emoji.overall"};
constexpr std::array<std::string_view, 3> kEntitySlots{"entity.person", "entity.group", "entity.other"};

constexpr std::array<std::string_view, 18> kOntoNotesTypes{
    "PERSON", "NORP",     "FAC",  "ORG",  "GPE",     "LOC",   "PRODUCT",  "EVENT",   "WORK_OF_ART",
    "LAW",    "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY", "QUANTITY", "ORDINAL", "CARDINAL"};

}  // namespace

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ascii_lower(c));
  }
  return out;
}

NgramBag char_ngrams(std::string_view normalized, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw Error("invalid n-gram range [" + std::to_string(n_min) + ", " +
                                              std::to_string(n_max) + "]");
  const auto bounds = utf8::boundaries(normalized);
  const std::size_t len = bounds.size() - 1;
  NgramBag bag;
  for (auto n = static_cast<std::size_t>(n_min); n <= static_cast<std::size_t>(n_max) && n <= len; ++n) {
    for (std::size_t i = 0; i + n <= len; ++i) {
      ++bag[std::string(normalized.substr(bounds[i], bounds[i + n] - bounds[i]))];
    }
  }
  return bag;
}

ConnectiveLexicon ConnectiveLexicon::defaults() {
  return ConnectiveLexicon({"because", "but", "however", "therefore", "so", "although", "since", "though",
                            "moreover", "thus"});
}

ConnectiveLexicon ConnectiveLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open connective lexicon '" + path.string() + "'");
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = trim(line);
    if (word.empty()) continue;
    std::string lowered(word);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), ascii_lower);
    words.insert(std::move(lowered));
  }
  return ConnectiveLexicon(std::move(words));
}

LinguisticFeatures linguistic_features(std::string_view text, const ConnectiveLexicon& connectives) {
  LinguisticFeatures f{};
  const auto tokens = whitespace_tokens(text);
  double token_chars = 0.0;
  for (auto token : tokens) {
    const auto chars = utf8::length(token);
    token_chars += static_cast<double>(chars);
    if (token.front() >= 'A' && token.front() <= 'Z') f[4] += 1;
    if (chars == 1) f[5] += 1;
    if (token.starts_with("http") || token == "URL") f[6] += 1;
    if (token.starts_with('@')) f[7] += 1;

    auto word = token;
    while (!word.empty() && is_ascii_punct(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_ascii_punct(word.back())) word.remove_suffix(1);
    std::string lowered(word);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), ascii_lower);
    if (!lowered.empty() && connectives.contains(lowered)) f[8] += 1;
  }
  f[0] = static_cast<double>(tokens.size());
  f[1] = static_cast<double>(utf8::length(text));
  f[2] = tokens.empty() ? 0.0 : token_chars / static_cast<double>(tokens.size());
  f[3] = static_cast<double>(std::count_if(text.begin(), text.end(), is_ascii_punct));
  return f;
}

std::size_t emoticon_count(std::string_view text) {
  const auto& re = emoticon_pattern();
  return static_cast<std::size_t>(
      std::distance(std::cregex_iterator(text.data(), text.data() + text.size(), re), std::cregex_iterator()));
}

EmojiLexicon EmojiLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open emoji lexicon '" + path.string() + "'");
  return parse(in, path.string());
}

EmojiLexicon EmojiLexicon::parse(std::istream& in, std::string_view source) {
  std::unordered_map<char32_t, EmojiScores> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_on(line, ',');
    const auto cp = parse_codepoint(fields.front());
    if (!cp && line_no == 1) continue;  // header
    std::array<double, 4> values{};
    bool ok = cp && fields.size() == 5;
    for (std::size_t i = 0; ok && i < 4; ++i) ok = parse_number(fields[i + 1], values[i]);
    if (!ok) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) +
                  ": expected 'codepoint_hex,p_negative,p_neutral,p_positive,sentiment_score'");
    }
    entries[*cp] = EmojiScores{values[2], values[0], values[3]};
  }
  return EmojiLexicon(std::move(entries));
}

const EmojiScores* EmojiLexicon::find(char32_t cp) const {
  const auto it = entries_.find(cp);
  return it == entries_.end() ? nullptr : &it->second;
}

std::array<double, 3> emoji_sentiment(std::string_view text, const EmojiLexicon& lexicon) {
  std::array<double, 3> sums{};
  if (lexicon.size() == 0) return sums;
  for (char32_t cp : utf8::decode(text)) {
    if (cp < 0x80) continue;
    if (const auto* s = lexicon.find(cp)) {
      sums[0] += s->p_positive;
      sums[1] += s->p_negative;
      sums[2] += s->sentiment;
    }
  }
  return sums;
}

EntityIndex EntityIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open entity sidecar '" + path.string() + "'");
  return parse(in, path.string());
}

EntityIndex EntityIndex::parse(std::istream& in, std::string_view source) {
  EntityIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_on(line, '\t');
    EntitySpan span{};
    if (fields.size() != 4 || fields[0].empty() || fields[3].empty() || !parse_number(fields[1], span.start) ||
        !parse_number(fields[2], span.end)) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) + ": expected 'id<TAB>start<TAB>end<TAB>type'");
    }
    span.type = std::string(fields[3]);
    index.spans_[std::string(fields[0])].push_back(std::move(span));
  }
  return index;
}

EntityAnnotation EntityIndex::lookup(const Instance& inst) const {
  EntityAnnotation annotation{inst.id, {}};
  const auto it = spans_.find(inst.id);
  if (it == spans_.end()) return annotation;
  const auto length = utf8::length(inst.text);
  for (const auto& span : it->second) {
    if (span.start >= span.end || span.end > length) {
      throw Error("entity span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                  ") is outside the text of instance '" + inst.id + "' (length " + std::to_string(length) + ")");
    }
  }
  annotation.spans = it->second;
  return annotation;
}

std::array<std::size_t, 3> entity_group_counts(const EntityAnnotation& annotation) {
  std::array<std::size_t, 3> counts{};
  for (const auto& span : annotation.spans) {
    if (span.type == "PERSON") {
      ++counts[0];
    } else if (span.type == "ORG" || span.type == "NORP" || span.type == "GPE") {
      ++counts[1];
    } else {
      if (std::find(kOntoNotesTypes.begin(), kOntoNotesTypes.end(), span.type) == kOntoNotesTypes.end()) {
        warn("instance '" + annotation.instance_id + "': unknown entity type '" + span.type +
             "' counted as other");
      }
      ++counts[2];
    }
  }
  return counts;
}

unsigned parse_feature_groups(std::string_view list) {
  unsigned groups = 0;
  for (auto name : split_on(list, ',')) {
    name = trim(name);
    if (name == "ngram") {
      groups |= static_cast<unsigned>(FeatureGroup::ngram);
    } else if (name == "linguistic") {
      groups |= static_cast<unsigned>(FeatureGroup::linguistic);
    } else if (name == "emoticon") {
      groups |= static_cast<unsigned>(FeatureGroup::emoticon);
    } else if (name == "emoji") {
      groups |= static_cast<unsigned>(FeatureGroup::emoji);
    } else if (name == "entity") {
      groups |= static_cast<unsigned>(FeatureGroup::entity);
    } else if (!name.empty()) {
      throw Error("unknown feature group '" + std::string(name) +
                  "' (expected ngram, linguistic, emoticon, emoji, entity)");
    }
  }
  if (groups == 0) throw Error("no feature groups selected");
  return groups;
}

std::string format_feature_groups(unsigned groups) {
  std::string out;
  const std::pair<FeatureGroup, const char*> names[] = {{FeatureGroup::ngram, "ngram"},
                                                        {FeatureGroup::linguistic, "linguistic"},
                                                        {FeatureGroup::emoticon, "emoticon"},
                                                        {FeatureGroup::emoji, "emoji"},
                                                        {FeatureGroup::entity, "entity"}};
  for (const auto& [g, name] : names) {
    if (groups & static_cast<unsigned>(g)) {
      if (!out.empty()) out += ',';
      out += name;
    }
  }
  return out;
}

std::vector<std::string> aux_slot_names(unsigned groups) {
  const FeatureConfig cfg{groups};
  std::vector<std::string> names;
  if (cfg.has(FeatureGroup::linguistic)) names.insert(names.end(), kLinguisticSlots.begin(), kLinguisticSlots.end());
  if (cfg.has(FeatureGroup::emoticon)) names.emplace_back(kEmoticonSlot);
  if (cfg.has(FeatureGroup::emoji)) names.insert(names.end(), kEmojiSlots.begin(), kEmojiSlots.end());
  if (cfg.has(FeatureGroup::entity)) names.insert(names.end(), kEntitySlots.begin(), kEntitySlots.end());
  return names;
}

AuxFeatures compute_aux(const Instance& instance, const FeatureConfig& config, const FeatureResources& resources) {
  AuxFeatures aux;
  if (config.has(FeatureGroup::linguistic)) aux.linguistic = linguistic_features(instance.text, resources.connectives);
  if (config.has(FeatureGroup::emoticon)) aux.emoticon_count = emoticon_count(instance.text);
  if (config.has(FeatureGroup::emoji)) {
    if (!resources.emoji) throw Error("emoji feature group is active but no emoji lexicon was loaded");
    aux.emoji_sentiment = emoji_sentiment(instance.text, *resources.emoji);
  }
  if (config.has(FeatureGroup::entity)) {
    if (!resources.entities) throw Error("entity feature group is active but no entity sidecar was loaded");
    aux.entity_groups = entity_group_counts(resources.entities->lookup(instance));
  }
  return aux;
}

SparseVector assemble(const Instance& instance, const FeatureSpace& space, const AuxFeatures& aux,
                      const FeatureConfig& config) {
  SparseVector out;
  if (config.has(FeatureGroup::ngram)) {
    for (const auto& [ngram, count] : char_ngrams(normalize(instance.text), config.n_min, config.n_max)) {
      if (const auto idx = space.ngram_index(ngram)) out.push_back({*idx, static_cast<double>(count)});
    }
    std::sort(out.begin(), out.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  }

  const auto put = [&](std::string_view slot, double value) {
    const auto idx = space.aux_index(slot);
    if (!idx) throw Error("feature group needs slot '" + std::string(slot) + "' which the feature space lacks");
    if (value != 0.0) out.push_back({*idx, value});
  };
  const std::size_t aux_begin = out.size();
  if (config.has(FeatureGroup::linguistic)) {
    for (std::size_t i = 0; i < kLinguisticCount; ++i) put(kLinguisticSlots[i], aux.linguistic[i]);
  }
  if (config.has(FeatureGroup::emoticon)) put(kEmoticonSlot, static_cast<double>(aux.emoticon_count));
  if (config.has(FeatureGroup::emoji)) {
    for (std::size_t i = 0; i < 3; ++i) put(kEmojiSlots[i], aux.emoji_sentiment[i]);
  }
  if (config.has(FeatureGroup::entity)) {
    for (std::size_t i = 0; i < 3; ++i) put(kEntitySlots[i], static_cast<double>(aux.entity_groups[i]));
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(aux_begin), out.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  out.push_back({space.bias_index(), 1.0});
  return out;
}

}  // namespace offlang
