#include <doctest.h>

#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "offlang/corpus.hpp"
#include "offlang/diagnostics.hpp"

using namespace offlang;

namespace {

Corpus parse(const std::string& text, Task task) {
  std::istringstream in(text);
  return parse_olid(in, task, "test.tsv");
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Corpus labeled_a(std::initializer_list<std::string_view> labels) {
  std::vector<Instance> v;
  int id = 0;
  for (auto l : labels) {
    Instance inst{std::to_string(++id), "tweet " + std::to_string(id), {}, {}, {}};
    inst.label_a = l == "OFF" ? OffenseLabel::OFF : OffenseLabel::NOT;
    v.push_back(inst);
  }
  return Corpus(Task::A, std::move(v));
}

}  // namespace

TEST_CASE("parse_olid maps fields and NULL labels") {
  const auto c = parse("86426\t@USER She should ask a few native Americans what their take on this is.\tOFF\tUNT\tNULL\n",
                       Task::A);
  REQUIRE(c.size() == 1);
  CHECK(c[0].id == "86426");
  CHECK(c[0].label_a == OffenseLabel::OFF);
  CHECK(c[0].label_b == TargetingLabel::UNT);
  CHECK_FALSE(c[0].label_c.has_value());
  CHECK(c.labeled());
}

TEST_CASE("parse_olid detects the header and keeps row order") {
  const auto c = parse("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n"
                       "3\tc\tNOT\tNULL\tNULL\n1\ta\tOFF\tTIN\tIND\n2\tb\tNOT\tNULL\tNULL\n",
                       Task::A);
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "3");
  CHECK(c[1].id == "1");
  CHECK(c[2].id == "2");
}

TEST_CASE("parse_olid accepts the two-column test layout as unlabeled") {
  const auto c = parse("id\ttweet\n15923\t#WhoIsQ #WherestheServer\n", Task::A);
  REQUIRE(c.size() == 1);
  CHECK_FALSE(c.labeled());
}

TEST_CASE("parse_olid keeps only rows labeled for the requested subtask") {
  const std::string data = "1\ta\tNOT\tNULL\tNULL\n2\tb\tOFF\tTIN\tGRP\n3\tc\tOFF\tUNT\tNULL\n";
  CHECK(parse(data, Task::A).size() == 3);
  CHECK(parse(data, Task::B).size() == 2);
  const auto c = parse(data, Task::C);
  REQUIRE(c.size() == 1);
  CHECK(c[0].id == "2");
}

TEST_CASE("parse_olid errors carry line numbers and offending values") {
  CHECK(error_of([] { parse("1\ta\tOFF\tNULL\tNULL\n2\tb\tOFF\n", Task::A); }).find("test.tsv:2") !=
        std::string::npos);
  const auto unknown = error_of([] { parse("1\ta\tOFFENSIVE\tNULL\tNULL\n", Task::A); });
  CHECK(unknown.find("'OFFENSIVE'") != std::string::npos);
  CHECK(unknown.find(":1:") != std::string::npos);
  CHECK(error_of([] { parse("1\ta\tOFF\tNULL\tNULL\n1\tb\tNOT\tNULL\tNULL\n", Task::A); })
            .find("duplicate id") != std::string::npos);
  // "NULL" is case-sensitive.
  CHECK_THROWS_AS(parse("1\ta\tOFF\tnull\tNULL\n", Task::A), Error);
}

TEST_CASE("label hierarchy is enforced") {
  CHECK_THROWS_WITH_AS(parse("1\ta\tOFF\tUNT\tIND\n", Task::C), doctest::Contains("requires subtask_b TIN"), Error);
  CHECK_THROWS_WITH_AS(parse("1\ta\tNOT\tTIN\tNULL\n", Task::B), doctest::Contains("requires subtask_a OFF"), Error);
}

TEST_CASE("empty file gives an empty corpus and a warning") {
  std::vector<std::string> warnings;
  auto previous = set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto c = parse("", Task::A);
  set_warning_sink(previous);
  CHECK(c.empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("no instances") != std::string::npos);
}

TEST_CASE("write_olid round-trips every field") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Instance> v;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      Instance inst;
      inst.id = "id" + std::to_string(i) + "_" + std::to_string(rng() % 1000);
      inst.text = "t\xC3\xA9xt " + std::to_string(rng()) + " \xF0\x9F\x98\x82 :)";
      switch (rng() % 4) {
        case 0: inst.label_a = OffenseLabel::NOT; break;
        case 1: inst.label_a = OffenseLabel::OFF; inst.label_b = TargetingLabel::UNT; break;
        case 2: inst.label_a = OffenseLabel::OFF; inst.label_b = TargetingLabel::TIN; inst.label_c = TargetLabel::OTH; break;
        default: inst.label_a = OffenseLabel::OFF; break;
      }
      v.push_back(inst);
    }
    const Corpus original(Task::A, v);
    std::ostringstream out;
    write_olid(out, original);
    std::istringstream in(out.str());
    const auto back = parse_olid(in, Task::A);
    REQUIRE(back.size() == original.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].id == original[i].id);
      CHECK(back[i].text == original[i].text);
      CHECK(back[i].label_a == original[i].label_a);
      CHECK(back[i].label_b == original[i].label_b);
      CHECK(back[i].label_c == original[i].label_c);
    }
  }
}

TEST_CASE("class_distribution") {
  const auto c = labeled_a({"OFF", "OFF", "NOT", "OFF"});
  const auto d = class_distribution(c);
  CHECK(d.at("OFF") == 3);
  CHECK(d.at("NOT") == 1);

  const auto unlabeled = parse("1\tsome text\n", Task::A);
  CHECK_THROWS_AS(class_distribution(unlabeled), Error);
}

TEST_CASE("split is stratified, exact and deterministic") {
  std::vector<Instance> v;
  for (int i = 0; i < 10; ++i) {
    Instance inst{std::to_string(i), "text", {}, {}, {}};
    inst.label_a = i < 5 ? OffenseLabel::OFF : OffenseLabel::NOT;
    v.push_back(inst);
  }
  const Corpus c(Task::A, v);
  const auto [train, held] = split(c, 0.2, 7);
  const auto d = class_distribution(held);
  CHECK(d.at("OFF") == 1);
  CHECK(d.at("NOT") == 1);
  CHECK(train.size() + held.size() == c.size());

  std::set<std::string> ids;
  for (const auto& i : train) ids.insert(i.id);
  for (const auto& i : held) CHECK(ids.insert(i.id).second);
  CHECK(ids.size() == c.size());

  const auto [train2, held2] = split(c, 0.2, 7);
  REQUIRE(held2.size() == held.size());
  for (std::size_t i = 0; i < held.size(); ++i) CHECK(held[i].id == held2[i].id);
}

TEST_CASE("split rejects classes too small to stratify") {
  const auto c = labeled_a({"OFF"});
  CHECK_THROWS_WITH_AS(split(c, 0.5, 1), doctest::Contains("OFF"), Error);
}

TEST_CASE("prediction exchange format") {
  std::istringstream in("1,OFF\n2,NOT\r\n");
  const auto rows = read_predictions(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::pair<std::string, std::string>{"2", "NOT"});
  std::ostringstream out;
  write_predictions(out, rows);
  CHECK(out.str() == "1,OFF\n2,NOT\n");

  std::istringstream bad("1,OFF,extra\n");
  CHECK_THROWS_WITH_AS(read_predictions(bad, "p.csv"), doctest::Contains("p.csv:1"), Error);
}
