#include <doctest.h>

#include <set>
#include <sstream>

#include "spanlink/error.hpp"
#include "spanlink/evaluation.hpp"
#include "spanlink/synthetic.hpp"

using namespace spanlink;

namespace {

EvalTriple E(std::size_t hb, std::size_t he, std::string r, std::size_t tb, std::size_t te) {
  return {{hb, he}, std::move(r), {tb, te}};
}

EvalSentence S(std::string id, std::vector<EvalTriple> ts, std::string text = std::string(64, 'x')) {
  return {std::move(id), std::move(text), std::move(ts)};
}

}  // namespace

TEST_CASE("four predicted, three gold, two matched") {
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3), E(4, 5, "r", 6, 7), E(8, 9, "q", 10, 11)})};
  std::vector<EvalSentence> pred{
      S("a", {E(0, 1, "r", 2, 3), E(4, 5, "r", 6, 7), E(0, 1, "q", 2, 3), E(12, 13, "r", 14, 15)})};
  auto prf = micro_prf(pred, gold).overall;
  CHECK(prf.precision == doctest::Approx(0.5));
  CHECK(prf.recall == doctest::Approx(0.6667).epsilon(1e-4));
  CHECK(prf.f1 == doctest::Approx(0.5714).epsilon(1e-4));
  CHECK(prf.matched == 2);
}

TEST_CASE("perfect, empty and zero-denominator cases") {
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3)})};
  CHECK(micro_prf(gold, gold).overall.f1 == 1.0);
  std::vector<EvalSentence> none{S("a", {})};
  auto p = micro_prf(none, gold).overall;
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
  CHECK(micro_prf(none, none).overall.f1 == 0.0);
}

TEST_CASE("micro averaging pools counts before dividing") {
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3)}),
                                 S("b", {E(0, 1, "r", 2, 3), E(4, 5, "r", 6, 7), E(8, 9, "r", 10, 11)})};
  std::vector<EvalSentence> pred{S("a", {E(0, 1, "r", 2, 3)}), S("b", {E(0, 1, "r", 2, 3)})};
  auto prf = micro_prf(pred, gold).overall;
  CHECK(prf.recall == doctest::Approx(0.5));  // 2 of 4, not the macro (1 + 1/3) / 2
  CHECK(prf.precision == 1.0);
}

TEST_CASE("unmatched sentence ids are a dataset error") {
  std::vector<EvalSentence> gold{S("a", {}), S("b", {})};
  std::vector<EvalSentence> pred{S("a", {}), S("c", {})};
  try {
    micro_prf(pred, gold);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    std::string msg = e.what();
    CHECK(msg.find("gold-only:b") != std::string::npos);
    CHECK(msg.find("prediction-only:c") != std::string::npos);
  }
}

TEST_CASE("duplicate predicted triples count once") {
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3)})};
  std::vector<EvalSentence> pred{S("a", {E(0, 1, "r", 2, 3), E(0, 1, "r", 2, 3)})};
  auto prf = micro_prf(pred, gold).overall;
  CHECK(prf.predicted == 1);
  CHECK(prf.precision == 1.0);
}

TEST_CASE("last-word matching compares final words only") {
  const std::string text = "Barack Obama visited New York City";
  std::vector<EvalSentence> gold{S("a", {E(7, 12, "r", 30, 34)}, text)};          // Obama, City
  std::vector<EvalSentence> pred{S("a", {E(0, 12, "r", 21, 34)}, text)};          // Barack Obama, New York City
  CHECK(micro_prf(pred, gold, MatchMode::kExactSpan).overall.f1 == 0.0);
  CHECK(micro_prf(pred, gold, MatchMode::kLastWord).overall.f1 == 1.0);
}

TEST_CASE("pattern and count splits over a ten-sentence fixture") {
  // Hand tally of gold patterns:
  //   s0..s3 normal (1 triple), s4 normal (2 disjoint triples), s5 EPO, s6 SEO,
  //   s7 EPO+SEO, s8 HTO, s9 no triples.
  std::vector<EvalSentence> gold{
      S("s0", {E(0, 1, "r", 2, 3)}),
      S("s1", {E(0, 1, "r", 2, 3)}),
      S("s2", {E(0, 1, "r", 2, 3)}),
      S("s3", {E(0, 1, "r", 2, 3)}),
      S("s4", {E(0, 1, "r", 2, 3), E(4, 5, "r", 6, 7)}),
      S("s5", {E(0, 1, "r", 2, 3), E(0, 1, "q", 2, 3)}),
      S("s6", {E(0, 1, "r", 2, 3), E(0, 1, "r", 4, 5)}),
      S("s7", {E(0, 1, "r", 2, 3), E(2, 3, "q", 0, 1), E(0, 1, "r", 6, 7)}),
      S("s8", {E(0, 5, "r", 3, 5)}),
      S("s9", {}),
  };
  auto pattern = split_report(gold, gold, SplitBy::kPattern);
  CHECK(pattern.per_split.at("Normal").gold == 6);
  CHECK(pattern.per_split.at("EPO").gold == 5);
  CHECK(pattern.per_split.at("SEO").gold == 5);
  CHECK(pattern.per_split.at("HTO").gold == 1);
  CHECK(pattern.overall.gold == 14);

  auto counts = split_report(gold, gold, SplitBy::kTripleCount);
  CHECK(counts.per_split.at("N=1").gold == 5);
  CHECK(counts.per_split.at("N=2").gold == 6);
  CHECK(counts.per_split.at("N=3").gold == 3);
  CHECK(counts.per_split.count("N=4") == 0);
  CHECK(counts.per_split.count("N>=5") == 0);
}

TEST_CASE("subtask report with one role swap") {
  // Gold: (A r B), (C q D), (E r F). Prediction swaps the roles of the second.
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3), E(4, 5, "q", 6, 7), E(8, 9, "r", 10, 11)})};
  std::vector<EvalSentence> pred{S("a", {E(0, 1, "r", 2, 3), E(6, 7, "q", 4, 5), E(8, 9, "r", 10, 11)})};
  auto rep = subtask_report(pred, gold);
  CHECK(rep.triples.matched == 2);
  CHECK(rep.pairs.matched == 2);
  CHECK(rep.relations.matched == 3);
  CHECK(rep.relations.f1 == 1.0);
  CHECK(rep.pairs.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("relaxed levels never recall less than the strict level") {
  auto syn = generate_synthetic({.sentences = 60, .normal = 0.25, .epo = 0.25, .seo = 0.25, .hto = 0.25},
                                Tokenizer::word_level());
  auto gold = to_eval(syn.sentences, syn.schema);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto pred = gold;
    for (auto& s : pred) {
      std::vector<EvalTriple> kept;
      for (auto t : s.triples) {
        switch (rng() % 4) {
          case 0:
            break;  // dropped
          case 1:
            std::swap(t.head, t.tail);
            kept.push_back(t);
            break;
          case 2:
            t.relation = "works_for";
            kept.push_back(t);
            break;
          default:
            kept.push_back(t);
        }
      }
      s.triples = kept;
    }
    auto rep = subtask_report(pred, gold);
    CHECK(rep.pairs.recall >= rep.triples.recall);
    CHECK(rep.relations.recall >= rep.triples.recall);
  }
}

TEST_CASE("error taxonomy categories") {
  // Gold (A r B). Head predicted only as a tail: entity role.
  std::vector<EvalSentence> gold{S("a", {E(0, 3, "r", 10, 13)})};
  std::vector<EvalSentence> role{S("a", {E(20, 22, "r", 0, 3)})};
  auto t1 = error_taxonomy(role, gold);
  CHECK(t1.entity_role == 1);
  CHECK(t1.entity_not_found == 1);  // the tail is absent entirely
  CHECK(t1.span_splitting == 0);

  // Partial head span in the head role: splitting wins over role.
  std::vector<EvalSentence> split{S("a", {E(0, 2, "r", 10, 13), E(20, 22, "r", 0, 3)})};
  auto t2 = error_taxonomy(split, gold);
  CHECK(t2 == ErrorTaxonomy{1, 0, 0});

  // Exact reproduction: no errors.
  CHECK(error_taxonomy(gold, gold).total() == 0);
}

TEST_CASE("length distribution on the synthetic corpus matches the surfaces") {
  auto syn = generate_synthetic({.sentences = 80, .normal = 0.25, .epo = 0.25, .seo = 0.25, .hto = 0.25},
                                Tokenizer::word_level());
  auto records = generate_synthetic_records({.sentences = 80, .normal = 0.25, .epo = 0.25, .seo = 0.25, .hto = 0.25});
  std::map<int, std::size_t> expected;
  std::size_t total = 0;
  for (const auto& r : records) {
    std::set<std::string> names;
    for (const auto& t : r.triples) {
      names.insert(t[0]);
      names.insert(t[2]);
    }
    for (const auto& n : names) {
      std::istringstream words(n);
      int count = 0;
      std::string w;
      while (words >> w) ++count;
      ++expected[count];
    }
    total += names.size();
  }
  auto dist = length_distribution(syn.sentences);
  CHECK(dist.histogram == expected);
  CHECK(dist.total == total);
  CHECK(dist.coverage.at(100) == expected.rbegin()->first);
  CHECK(dist.coverage.at(95) <= dist.coverage.at(99));
}

TEST_CASE("theta sweep re-thresholds stored scores") {
  PredictionFile file;
  file.theta = 0.3;
  file.relations = {"r"};
  StoredSentence s{"a", std::string(20, 'x'), {}};
  s.triples.push_back({"", {}, {0, 1}, "r", "", {}, {2, 3}, 0.9});   // correct
  s.triples.push_back({"", {}, {4, 5}, "r", "", {}, {6, 7}, 0.45});  // wrong
  s.triples.push_back({"", {}, {8, 9}, "r", "", {}, {2, 3}, 0.35});  // correct
  file.sentences.push_back(s);
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3), E(8, 9, "r", 2, 3)}, std::string(20, 'x'))};
  std::vector<double> grid{0.3, 0.4, 0.5};
  auto sweep = sweep_theta(gold, file, grid);
  REQUIRE(sweep.curve.size() == 3);
  CHECK(sweep.curve[0].prf.f1 == doctest::Approx(0.8));
  CHECK(sweep.curve[1].prf.f1 == doctest::Approx(0.5));
  CHECK(sweep.curve[2].prf.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(sweep.best_theta == 0.3);

  std::vector<double> below{0.2};
  CHECK_THROWS_AS(sweep_theta(gold, file, below), ConfigError);
}

TEST_CASE("theta sweep ties go to the larger threshold") {
  PredictionFile file;
  file.theta = 0.1;
  StoredSentence s{"a", std::string(8, 'x'), {}};
  s.triples.push_back({"", {}, {0, 1}, "r", "", {}, {2, 3}, 0.9});
  file.sentences.push_back(s);
  std::vector<EvalSentence> gold{S("a", {E(0, 1, "r", 2, 3)}, std::string(8, 'x'))};
  std::vector<double> grid{0.2, 0.5, 0.7};
  CHECK(sweep_theta(gold, file, grid).best_theta == 0.7);
}

TEST_CASE("match mode parsing") {
  CHECK(parse_match_mode("last-word") == MatchMode::kLastWord);
  CHECK(to_string(MatchMode::kExactSpan) == "exact-span");
  CHECK_THROWS_AS(parse_match_mode("fuzzy"), ConfigError);
}
