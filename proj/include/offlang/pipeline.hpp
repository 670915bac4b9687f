#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "offlang/config.hpp"
#include "offlang/corpus.hpp"
#include "offlang/features.hpp"
#include "offlang/selection.hpp"
#include "offlang/svm.hpp"

namespace offlang {

/// Lexicons and annotations loaded once per run and shared read-only.
class LoadedResources {
 public:
  static LoadedResources load(const RunConfig& config);

  FeatureResources view() const;

 private:
  ConnectiveLexicon connectives_ = ConnectiveLexicon::defaults();
  std::optional<EmojiLexicon> emoji_;
  std::optional<EntityIndex> entities_;
};

/// Per-instance n-gram bags of the normalized texts.
std::vector<NgramBag> ngram_bags(const Corpus& corpus, const FeatureConfig& features, unsigned threads);

/// Information-gain ranked candidates (min_df filtered) for the corpus task.
std::vector<IgScore> rank_candidates(const Corpus& corpus, const RunConfig& config, unsigned threads);

/// Top-k n-grams (if the n-gram group is active) plus the aux slots of the
/// active groups.
FeatureSpace build_space(const Corpus& train, const RunConfig& config, unsigned threads);

SparseMatrix featurize(const Corpus& corpus, const FeatureSpace& space, const FeatureConfig& features,
                       const FeatureResources& resources, unsigned threads);

struct TrainedPipeline {
  FeatureSpace space;
  SvmModel model;
};

TrainedPipeline train_pipeline(const Corpus& train, const RunConfig& config, const FeatureResources& resources);

/// Checks that `space` is what `features` would assemble into: n-gram slot
/// lengths within the configured range and aux slots matching the groups.
void check_space_matches(const FeatureSpace& space, const FeatureConfig& features);

/// `id,label` rows in corpus order.
std::vector<std::pair<std::string, std::string>> predict_corpus(const SvmModel& model, const FeatureSpace& space,
                                                                const Corpus& corpus, const FeatureConfig& features,
                                                                const FeatureResources& resources, unsigned threads);

}  // namespace offlang
