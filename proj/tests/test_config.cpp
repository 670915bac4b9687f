#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "offlang/config.hpp"
#include "offlang/diagnostics.hpp"

using namespace offlang;

TEST_CASE("key-value parsing") {
  std::istringstream in("# comment\n task = C \nk=500 # trailing\n\nC = 0.5\n");
  const auto kv = parse_key_values(in);
  CHECK(kv == KeyValues{{"task", "C"}, {"k", "500"}, {"C", "0.5"}});
  std::istringstream bad("task C\n");
  CHECK_THROWS_WITH_AS(parse_key_values(bad, "x.cfg"), doctest::Contains("x.cfg:1"), Error);
}

TEST_CASE("run config from key-values") {
  const auto cfg = RunConfig::from_key_values(
      {{"task", "B"}, {"groups", "ngram,emoji"}, {"n_min", "3"}, {"n_max", "5"}, {"k", "10"}, {"min_df", "1"},
       {"C", "2.5"}, {"seed", "9"}, {"shuffle", "false"}, {"threads", "2"}, {"model", "m.model"}});
  CHECK(cfg.task == Task::B);
  CHECK(cfg.features.has(FeatureGroup::emoji));
  CHECK_FALSE(cfg.features.has(FeatureGroup::entity));
  CHECK(cfg.features.n_min == 3);
  CHECK(cfg.features.n_max == 5);
  CHECK(cfg.k == 10);
  CHECK(cfg.min_df == 1);
  CHECK(cfg.svm.C == 2.5);
  CHECK(cfg.svm.seed == 9);
  CHECK_FALSE(cfg.svm.shuffle);
  CHECK(cfg.resolved_threads() == 2);
  CHECK(cfg.space_path() == "m.model.space");
}

TEST_CASE("run config errors name the key") {
  CHECK_THROWS_WITH_AS(RunConfig::from_key_values({{"kk", "1"}}), doctest::Contains("'kk'"), Error);
  CHECK_THROWS_WITH_AS(RunConfig::from_key_values({{"k", "ten"}}), doctest::Contains("'k'"), Error);
  CHECK_THROWS_WITH_AS(RunConfig::from_key_values({{"task", "D"}}), doctest::Contains("'task'"), Error);
  const auto no_train = RunConfig::from_key_values({{"model", "m"}});
  CHECK_THROWS_WITH_AS(no_train.validate(true), doctest::Contains("'train'"), Error);
  const auto bad_range = RunConfig::from_key_values({{"n_min", "4"}, {"n_max", "3"}});
  CHECK_THROWS_AS(bad_range.validate(false), Error);
  const auto emoji = RunConfig::from_key_values({{"groups", "ngram,emoji"}});
  CHECK_THROWS_WITH_AS(emoji.validate(false), doctest::Contains("emoji_lexicon"), Error);
  const auto zero_c = RunConfig::from_key_values({{"C", "0"}});
  CHECK_THROWS_AS(zero_c.validate(false), Error);
}

TEST_CASE("OFFLANG_THREADS is the fallback thread count") {
  ::setenv("OFFLANG_THREADS", "3", 1);
  CHECK(RunConfig{}.resolved_threads() == 3);
  ::unsetenv("OFFLANG_THREADS");
  CHECK(RunConfig{}.resolved_threads() >= 1);
}

TEST_CASE("shipped preset files match the built-in presets") {
  for (auto name : preset_names()) {
    const auto from_file =
        load_key_values(std::string(OFFLANG_SOURCE_DIR) + "/presets/" + std::string(name) + ".cfg");
    std::istringstream in{std::string(*preset_text(name))};
    CHECK(from_file == parse_key_values(in));
    const auto cfg = RunConfig::from_key_values(from_file);
    CHECK(cfg.svm.C == 0.1);
    CHECK(cfg.k == 1000);
    CHECK(cfg.features.n_min == 2);
    CHECK(cfg.features.n_max == 7);
    CHECK(cfg.features.groups == static_cast<unsigned>(FeatureGroup::ngram));
  }
  CHECK(RunConfig::from_key_values(load_key_values(std::string(OFFLANG_SOURCE_DIR) + "/presets/official-c.cfg")).task ==
        Task::C);
  CHECK_FALSE(preset_text("official-d").has_value());
}
