#include "spanlink/decoder.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spanlink/error.hpp"

namespace spanlink {

using nlohmann::json;

std::vector<PredictedTriple> decode(const LinkScoreTensor& probs, std::span<const Span> spans, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw RangeError("threshold must lie in (0, 1)");
  if (static_cast<std::size_t>(probs.entities()) != spans.size()) {
    throw ShapeError("score tensor has " + std::to_string(probs.entities()) + " entities but " +
                     std::to_string(spans.size()) + " spans were given");
  }
  std::vector<PredictedTriple> out;
  const Eigen::Index n = probs.entities();
  for (int k = 0; k < probs.relations(); ++k) {
    const Matrix& p = probs.slice(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (p(i, j) > theta) out.push_back({spans[i], k, spans[j], p(i, j)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  return out;
}

std::vector<PredictedTriple> predict_sentence(const Sentence& sentence, const Model& model, int c_infer,
                                              double theta) {
  CandidateSet candidates = inference_set(sentence, c_infer);
  LinkScoreTensor probs = model.score(sentence, candidates);
  return decode(probs, candidates.spans, theta);
}

void write_predictions(const std::filesystem::path& path, std::span<const SentencePrediction> predictions,
                       std::span<const Sentence> sentences, const RelationSchema& schema, double theta) {
  if (predictions.size() != sentences.size()) throw ShapeError("one prediction per sentence is required");
  json root;
  root["format"] = "spanlink-predictions";
  root["version"] = kPredictionFormatVersion;
  root["theta"] = theta;
  root["relations"] = schema.names();
  json list = json::array();
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sent = sentences[s];
    if (predictions[s].id != sent.id) throw ShapeError("prediction order does not match sentence order");
    json triples = json::array();
    for (const auto& t : predictions[s].triples) {
      const CharSpan hc = sent.char_span(t.head);
      const CharSpan tc = sent.char_span(t.tail);
      triples.push_back({{"head_text", sent.surface(t.head)},
                         {"head_span", {t.head.start, t.head.end}},
                         {"head_char", {hc.begin, hc.end}},
                         {"relation_name", schema.name(t.relation)},
                         {"tail_text", sent.surface(t.tail)},
                         {"tail_span", {t.tail.start, t.tail.end}},
                         {"tail_char", {tc.begin, tc.end}},
                         {"score", t.score}});
    }
    list.push_back({{"id", sent.id}, {"text", sent.text}, {"triples", std::move(triples)}});
  }
  root["sentences"] = std::move(list);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write predictions " + path.string());
  out << root.dump(1) << '\n';
}

PredictionFile read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open predictions " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json root;
  try {
    root = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw DatasetError(path.string() + ": invalid prediction JSON: " + e.what());
  }
  PredictionFile f;
  try {
    if (root.at("format").get<std::string>() != "spanlink-predictions") {
      throw DatasetError(path.string() + " is not a prediction file");
    }
    f.version = root.at("version").get<int>();
    if (f.version != kPredictionFormatVersion) {
      throw DatasetError(path.string() + ": unsupported prediction format version " + std::to_string(f.version));
    }
    f.theta = root.at("theta").get<double>();
    f.relations = root.at("relations").get<std::vector<std::string>>();
    for (const auto& js : root.at("sentences")) {
      StoredSentence s;
      s.id = js.at("id").get<std::string>();
      s.text = js.at("text").get<std::string>();
      for (const auto& jt : js.at("triples")) {
        StoredTriple t;
        t.head_text = jt.at("head_text").get<std::string>();
        t.head_span = {jt.at("head_span")[0].get<int>(), jt.at("head_span")[1].get<int>()};
        t.head_char = {jt.at("head_char")[0].get<std::size_t>(), jt.at("head_char")[1].get<std::size_t>()};
        t.relation = jt.at("relation_name").get<std::string>();
        t.tail_text = jt.at("tail_text").get<std::string>();
        t.tail_span = {jt.at("tail_span")[0].get<int>(), jt.at("tail_span")[1].get<int>()};
        t.tail_char = {jt.at("tail_char")[0].get<std::size_t>(), jt.at("tail_char")[1].get<std::size_t>()};
        t.score = jt.at("score").get<double>();
        s.triples.push_back(std::move(t));
      }
      f.sentences.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw DatasetError(path.string() + ": malformed prediction file: " + e.what());
  }
  return f;
}

}  // namespace spanlink
