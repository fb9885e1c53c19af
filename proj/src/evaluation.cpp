#include "spanlink/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <set>

#include "spanlink/error.hpp"

namespace spanlink {

MatchMode parse_match_mode(std::string_view s) {
  if (s == "exact-span") return MatchMode::kExactSpan;
  if (s == "last-word") return MatchMode::kLastWord;
  throw ConfigError("unknown match mode '" + std::string(s) + "' (expected exact-span or last-word)");
}

std::string_view to_string(MatchMode m) { return m == MatchMode::kExactSpan ? "exact-span" : "last-word"; }

EvalSentence to_eval(const Sentence& gold, const RelationSchema& schema) {
  EvalSentence e{gold.id, gold.text, {}};
  for (const auto& t : gold.gold_triples) {
    e.triples.push_back({gold.char_span(t.head), schema.name(t.relation), gold.char_span(t.tail)});
  }
  return e;
}

EvalSentence to_eval(const Sentence& sentence, std::span<const PredictedTriple> predicted,
                     const RelationSchema& schema) {
  EvalSentence e{sentence.id, sentence.text, {}};
  for (const auto& t : predicted) {
    e.triples.push_back({sentence.char_span(t.head), schema.name(t.relation), sentence.char_span(t.tail)});
  }
  return e;
}

EvalSentence to_eval(const StoredSentence& stored) {
  EvalSentence e{stored.id, stored.text, {}};
  for (const auto& t : stored.triples) e.triples.push_back({t.head_char, t.relation, t.tail_char});
  return e;
}

std::vector<EvalSentence> to_eval(std::span<const Sentence> golds, const RelationSchema& schema) {
  std::vector<EvalSentence> out;
  out.reserve(golds.size());
  for (const auto& s : golds) out.push_back(to_eval(s, schema));
  return out;
}

Prf Prf::from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
  Prf p;
  p.matched = matched;
  p.predicted = predicted;
  p.gold = gold;
  p.precision = predicted ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
  p.recall = gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  p.f1 = p.precision + p.recall > 0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

namespace {

struct Counts {
  std::size_t matched = 0, predicted = 0, gold = 0;
  void add(const Counts& o) {
    matched += o.matched;
    predicted += o.predicted;
    gold += o.gold;
  }
  Prf prf() const { return Prf::from_counts(matched, predicted, gold); }
};

CharSpan last_word(std::string_view text, CharSpan c) {
  std::size_t e = std::min(c.end, text.size());
  while (e > c.begin && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::size_t b = e;
  while (b > c.begin && !std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  return {b, e};
}

std::set<EvalTriple> normalized(const EvalSentence& s, MatchMode mode) {
  std::set<EvalTriple> out;
  for (EvalTriple t : s.triples) {
    if (mode == MatchMode::kLastWord) {
      t.head = last_word(s.text, t.head);
      t.tail = last_word(s.text, t.tail);
    }
    out.insert(std::move(t));
  }
  return out;
}

struct Paired {
  const EvalSentence* prediction;
  const EvalSentence* gold;
};

std::vector<Paired> pair_by_id(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds) {
  std::map<std::string, const EvalSentence*> pred_by_id;
  for (const auto& p : predictions) {
    if (!pred_by_id.emplace(p.id, &p).second) throw DatasetError("duplicate prediction id '" + p.id + "'");
  }
  std::vector<Paired> out;
  std::vector<std::string> orphans;
  std::set<std::string> seen;
  for (const auto& g : golds) {
    if (!seen.insert(g.id).second) throw DatasetError("duplicate gold id '" + g.id + "'");
    auto it = pred_by_id.find(g.id);
    if (it == pred_by_id.end()) {
      orphans.push_back("gold-only:" + g.id);
      continue;
    }
    out.push_back({it->second, &g});
  }
  for (const auto& [id, p] : pred_by_id) {
    if (!seen.count(id)) orphans.push_back("prediction-only:" + id);
  }
  if (!orphans.empty()) {
    std::string msg = "sentence ids do not match between gold and predictions:";
    for (std::size_t i = 0; i < orphans.size() && i < 20; ++i) msg += " " + orphans[i];
    if (orphans.size() > 20) msg += " ... (" + std::to_string(orphans.size()) + " total)";
    throw DatasetError(msg);
  }
  return out;
}

Counts triple_counts(const EvalSentence& pred, const EvalSentence& gold, MatchMode mode) {
  auto p = normalized(pred, mode);
  auto g = normalized(gold, mode);
  Counts c;
  c.predicted = p.size();
  c.gold = g.size();
  for (const auto& t : p) c.matched += g.count(t);
  return c;
}

template <typename Key>
Counts multiset_counts(const std::vector<Key>& pred, const std::vector<Key>& gold) {
  std::map<Key, std::size_t> gp, gg;
  for (const auto& k : pred) ++gp[k];
  for (const auto& k : gold) ++gg[k];
  Counts c;
  c.predicted = pred.size();
  c.gold = gold.size();
  for (const auto& [k, n] : gp) {
    auto it = gg.find(k);
    if (it != gg.end()) c.matched += std::min(n, it->second);
  }
  return c;
}

std::vector<std::string> split_names(const EvalSentence& gold, SplitBy split_by) {
  PatternLabel label = classify_pattern(gold);
  std::vector<std::string> names;
  if (split_by == SplitBy::kPattern) {
    if (label.is_normal) names.push_back("Normal");
    if (label.has_epo) names.push_back("EPO");
    if (label.has_seo) names.push_back("SEO");
    if (label.has_hto) names.push_back("HTO");
  } else if (label.triple_count_bucket > 0) {
    names.push_back(label.triple_count_bucket >= 5 ? "N>=5" : "N=" + std::to_string(label.triple_count_bucket));
  }
  return names;
}

}  // namespace

PatternLabel classify_pattern(const EvalSentence& sentence) {
  // Character intervals become inclusive spans; relations become indices.
  RelationSchema names;
  std::vector<GoldTriple> triples;
  for (const auto& t : sentence.triples) {
    auto to_span = [](CharSpan c) { return Span{static_cast<int>(c.begin), static_cast<int>(c.end) - 1}; };
    triples.push_back({to_span(t.head), names.intern(t.relation), to_span(t.tail)});
  }
  return classify_pattern(triples);
}

EvalReport micro_prf(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds, MatchMode mode) {
  Counts total;
  for (const auto& p : pair_by_id(predictions, golds)) total.add(triple_counts(*p.prediction, *p.gold, mode));
  return {total.prf(), {}};
}

EvalReport split_report(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                        SplitBy split_by, MatchMode mode) {
  Counts total;
  std::map<std::string, Counts> splits;
  for (const auto& p : pair_by_id(predictions, golds)) {
    Counts c = triple_counts(*p.prediction, *p.gold, mode);
    total.add(c);
    for (const auto& name : split_names(*p.gold, split_by)) splits[name].add(c);
  }
  EvalReport report{total.prf(), {}};
  for (const auto& [name, c] : splits) report.per_split[name] = c.prf();
  return report;
}

SubtaskReport subtask_report(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                             MatchMode mode) {
  Counts pairs, relations, triples;
  for (const auto& p : pair_by_id(predictions, golds)) {
    auto pt = normalized(*p.prediction, mode);
    auto gt = normalized(*p.gold, mode);
    std::vector<std::pair<CharSpan, CharSpan>> pp, gp;
    std::vector<std::string> pr, gr;
    for (const auto& t : pt) {
      pp.emplace_back(t.head, t.tail);
      pr.push_back(t.relation);
    }
    for (const auto& t : gt) {
      gp.emplace_back(t.head, t.tail);
      gr.push_back(t.relation);
    }
    pairs.add(multiset_counts(pp, gp));
    relations.add(multiset_counts(pr, gr));
    triples.add(triple_counts(*p.prediction, *p.gold, mode));
  }
  return {pairs.prf(), relations.prf(), triples.prf()};
}

ErrorTaxonomy error_taxonomy(std::span<const EvalSentence> predictions, std::span<const EvalSentence> golds,
                             MatchMode mode) {
  ErrorTaxonomy tax;
  auto overlaps = [](CharSpan a, CharSpan b) { return a.begin < b.end && b.begin < a.end; };
  for (const auto& p : pair_by_id(predictions, golds)) {
    auto pt = normalized(*p.prediction, mode);
    auto gt = normalized(*p.gold, mode);
    std::set<CharSpan> heads, tails;
    for (const auto& t : pt) {
      heads.insert(t.head);
      tails.insert(t.tail);
    }
    auto classify = [&](CharSpan entity, const std::set<CharSpan>& same, const std::set<CharSpan>& opposite) {
      if (same.count(entity)) return;
      bool split = std::any_of(same.begin(), same.end(), [&](CharSpan c) { return overlaps(c, entity); });
      if (split) {
        ++tax.span_splitting;
        return;
      }
      bool other = std::any_of(opposite.begin(), opposite.end(), [&](CharSpan c) { return overlaps(c, entity); });
      if (!other) {
        ++tax.entity_not_found;
      } else {
        ++tax.entity_role;
      }
    };
    for (const auto& t : gt) {
      classify(t.head, heads, tails);
      classify(t.tail, tails, heads);
    }
  }
  return tax;
}

LengthDistribution length_distribution(std::span<const Sentence> sentences) {
  LengthDistribution out;
  for (const auto& s : sentences) {
    std::set<Span> entities;
    for (const auto& t : s.gold_triples) {
      entities.insert(t.head);
      entities.insert(t.tail);
    }
    for (const auto& e : entities) ++out.histogram[e.length()];
    out.total += entities.size();
  }
  for (int percent : {95, 99, 100}) {
    if (out.total == 0) {
      out.coverage[percent] = 0;
      continue;
    }
    // Smallest C with cumulative * 100 >= percent * total, in integers.
    std::size_t cumulative = 0;
    for (const auto& [len, n] : out.histogram) {
      cumulative += n;
      if (cumulative * 100 >= static_cast<std::size_t>(percent) * out.total) {
        out.coverage[percent] = len;
        break;
      }
    }
  }
  return out;
}

TimingReport timing_harness(const Model& model, std::span<const Sentence> sentences, int repetitions, int c_infer,
                            double theta, int warmup) {
  if (repetitions <= 0) throw ConfigError("timing harness needs at least one repetition");
  if (sentences.empty()) throw ConfigError("timing harness needs at least one sentence");
  using clock = std::chrono::steady_clock;
  std::size_t sink = 0;
  for (int w = 0; w < warmup; ++w) {
    for (const auto& s : sentences) sink += predict_sentence(s, model, c_infer, theta).size();
  }
  std::vector<double> per_sentence;
  for (int r = 0; r < repetitions; ++r) {
    auto t0 = clock::now();
    for (const auto& s : sentences) sink += predict_sentence(s, model, c_infer, theta).size();
    auto t1 = clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    per_sentence.push_back(ms / static_cast<double>(sentences.size()));
  }
  (void)sink;
  TimingReport rep;
  rep.repetitions = static_cast<std::size_t>(repetitions);
  rep.sentences = sentences.size();
  double sum = 0.0;
  for (double v : per_sentence) sum += v;
  rep.mean_ms = sum / static_cast<double>(per_sentence.size());
  double var = 0.0;
  for (double v : per_sentence) var += (v - rep.mean_ms) * (v - rep.mean_ms);
  rep.stddev_ms = per_sentence.size() > 1 ? std::sqrt(var / static_cast<double>(per_sentence.size() - 1)) : 0.0;
  return rep;
}

ThetaSweep sweep_theta(std::span<const EvalSentence> golds, const PredictionFile& scored, std::span<const double> grid,
                       MatchMode mode) {
  if (grid.empty()) throw ConfigError("threshold grid is empty");
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("threshold grid values must lie in (0, 1)");
    if (t < scored.theta) {
      throw ConfigError("grid value " + std::to_string(t) + " is below the threshold the scores were cut at (" +
                        std::to_string(scored.theta) + ")");
    }
  }
  ThetaSweep sweep;
  bool first = true;
  for (double theta : grid) {
    std::vector<EvalSentence> preds;
    preds.reserve(scored.sentences.size());
    for (const auto& s : scored.sentences) {
      EvalSentence e{s.id, s.text, {}};
      for (const auto& t : s.triples) {
        if (t.score > theta) e.triples.push_back({t.head_char, t.relation, t.tail_char});
      }
      preds.push_back(std::move(e));
    }
    Prf prf = micro_prf(preds, golds, mode).overall;
    sweep.curve.push_back({theta, prf});
    if (first || prf.f1 > sweep.best_f1 || (prf.f1 == sweep.best_f1 && theta > sweep.best_theta)) {
      sweep.best_f1 = prf.f1;
      sweep.best_theta = theta;
      first = false;
    }
  }
  return sweep;
}

}  // namespace spanlink
