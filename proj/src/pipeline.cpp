#include "offlang/pipeline.hpp"

#include <algorithm>
#include <thread>

#include "offlang/diagnostics.hpp"
#include "offlang/utf8.hpp"

namespace offlang {
namespace {

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is written by
// exactly one worker, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 64 + 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

LoadedResources LoadedResources::load(const RunConfig& config) {
  LoadedResources r;
  if (!config.connectives.empty()) r.connectives_ = ConnectiveLexicon::load(config.connectives);
  if (config.features.has(FeatureGroup::emoji)) r.emoji_ = EmojiLexicon::load(config.emoji_lexicon);
  if (config.features.has(FeatureGroup::entity)) r.entities_ = EntityIndex::load(config.entities);
  return r;
}

FeatureResources LoadedResources::view() const {
  FeatureResources v;
  v.connectives = connectives_;
  v.emoji = emoji_ ? &*emoji_ : nullptr;
  v.entities = entities_ ? &*entities_ : nullptr;
  return v;
}

std::vector<NgramBag> ngram_bags(const Corpus& corpus, const FeatureConfig& features, unsigned threads) {
  std::vector<NgramBag> bags(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    bags[i] = char_ngrams(normalize(corpus[i].text), features.n_min, features.n_max);
  });
  return bags;
}

std::vector<IgScore> rank_candidates(const Corpus& corpus, const RunConfig& config, unsigned threads) {
  const auto labels = corpus.label_indices();
  const auto bags = ngram_bags(corpus, config.features, threads);
  auto scores = score_candidates(document_presence(bags, config.min_df), labels,
                                 task_classes(corpus.task()).size(), threads);
  rank_scores(scores);
  return scores;
}

FeatureSpace build_space(const Corpus& train, const RunConfig& config, unsigned threads) {
  auto aux = aux_slot_names(config.features.groups);
  if (!config.features.has(FeatureGroup::ngram)) return FeatureSpace({}, std::move(aux));
  return select_top_k(rank_candidates(train, config, threads), config.k).with_aux(std::move(aux));
}

SparseMatrix featurize(const Corpus& corpus, const FeatureSpace& space, const FeatureConfig& features,
                       const FeatureResources& resources, unsigned threads) {
  SparseMatrix x;
  x.cols = space.size();
  x.rows.resize(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    x.rows[i] = assemble(corpus[i], space, compute_aux(corpus[i], features, resources), features);
  });
  return x;
}

TrainedPipeline train_pipeline(const Corpus& train, const RunConfig& config, const FeatureResources& resources) {
  if (train.empty()) throw Error("training corpus is empty");
  const unsigned threads = config.resolved_threads();
  auto space = build_space(train, config, threads);
  const auto x = featurize(train, space, config.features, resources, threads);
  const auto classes = task_classes(train.task());
  auto model = train_ovr(x, train.label_indices(), {classes.begin(), classes.end()}, config.svm,
                         space.fingerprint(), threads);
  return {std::move(space), std::move(model)};
}

void check_space_matches(const FeatureSpace& space, const FeatureConfig& features) {
  if (space.aux_slots() != aux_slot_names(features.groups)) {
    throw Error("feature space auxiliary slots do not match groups '" + format_feature_groups(features.groups) +
                "'");
  }
  for (const auto& g : space.ngram_slots()) {
    const auto n = static_cast<int>(utf8::length(g));
    if (n < features.n_min || n > features.n_max) {
      throw Error("feature space n-gram '" + g + "' lies outside the configured range [" +
                  std::to_string(features.n_min) + ", " + std::to_string(features.n_max) + "]");
    }
  }
}

std::vector<std::pair<std::string, std::string>> predict_corpus(const SvmModel& model, const FeatureSpace& space,
                                                                const Corpus& corpus, const FeatureConfig& features,
                                                                const FeatureResources& resources, unsigned threads) {
  if (model.space_fingerprint() != space.fingerprint()) {
    throw Error("feature space fingerprint " + space.fingerprint() + " does not match model (" +
                model.space_fingerprint() + ")");
  }
  if (model.dimension() != space.size()) throw Error("model dimension does not match feature space size");
  const auto x = featurize(corpus, space, features, resources, threads);
  std::vector<std::pair<std::string, std::string>> rows(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    rows[i] = {corpus[i].id, predict(model, space.fingerprint(), x.rows[i]).label};
  }
  return rows;
}

}  // namespace offlang
