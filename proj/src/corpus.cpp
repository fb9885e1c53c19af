#include "spanlink/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spanlink/error.hpp"

namespace spanlink {

using nlohmann::json;

RelationSchema::RelationSchema(std::vector<std::string> names) {
  if (names.empty()) throw ConfigError("relation schema must contain at least one relation");
  for (auto& n : names) {
    if (index_.count(n)) throw ConfigError("duplicate relation name '" + n + "'");
    index_.emplace(n, static_cast<int>(names_.size()));
    names_.push_back(std::move(n));
  }
}

std::optional<int> RelationSchema::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int RelationSchema::intern(std::string_view name) {
  if (auto k = find(name)) return *k;
  index_.emplace(std::string(name), static_cast<int>(names_.size()));
  names_.emplace_back(name);
  return static_cast<int>(names_.size()) - 1;
}

CharSpan Sentence::char_span(const Span& s) const {
  if (s.start < 0 || s.end >= length() || s.start > s.end) throw RangeError("span outside sentence " + id);
  return {char_offsets[s.start].begin, char_offsets[s.end].end};
}

std::string Sentence::surface(const Span& s) const {
  CharSpan c = char_span(s);
  return text.substr(c.begin, c.size());
}

SchemaMode parse_schema_mode(std::string_view s) {
  if (s == "exact-span") return SchemaMode::kExactSpan;
  if (s == "last-word") return SchemaMode::kLastWord;
  throw ConfigError("unknown schema mode '" + std::string(s) + "' (expected exact-span or last-word)");
}

std::string_view to_string(SchemaMode m) { return m == SchemaMode::kExactSpan ? "exact-span" : "last-word"; }

namespace {

Record parse_record(const json& j, std::size_t index, const std::string& where) {
  if (!j.is_object()) throw DatasetError(where + ": record is not a JSON object");
  Record r;
  if (j.contains("id")) {
    const auto& id = j.at("id");
    if (id.is_string()) {
      r.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      r.id = std::to_string(id.get<long long>());
    } else {
      throw DatasetError(where + ": field 'id' must be a string or integer");
    }
  } else {
    r.id = std::to_string(index);
  }
  if (!j.contains("text") || !j.at("text").is_string()) throw DatasetError(where + ": missing string field 'text'");
  r.text = j.at("text").get<std::string>();
  if (r.text.find_first_not_of(" \t\r\n") == std::string::npos) throw DatasetError(where + ": empty 'text'");
  if (!j.contains("triple_list") || !j.at("triple_list").is_array()) {
    throw DatasetError(where + ": missing array field 'triple_list'");
  }
  for (const auto& t : j.at("triple_list")) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_string() || !t[2].is_string()) {
      throw DatasetError(where + ": triple must be [head, relation, tail] strings");
    }
    r.triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
  }
  return r;
}

// Boundaries of whitespace/punctuation words, used to prefer occurrences
// that do not start or end inside a word.
struct WordBoundaries {
  std::set<std::size_t> begins;
  std::set<std::size_t> ends;

  explicit WordBoundaries(std::string_view text) {
    for (CharSpan w : pretokenize(text)) {
      begins.insert(w.begin);
      ends.insert(w.end);
    }
  }
  bool aligned(std::size_t b, std::size_t e) const { return begins.count(b) && ends.count(e); }
};

struct Located {
  std::optional<CharSpan> span;
  bool ambiguous = false;
};

Located locate(std::string_view text, std::string_view entity, const WordBoundaries& bounds) {
  Located out;
  if (entity.empty()) return out;
  std::optional<CharSpan> first_raw;
  std::size_t occurrences = 0;
  for (std::size_t pos = text.find(entity); pos != std::string_view::npos; pos = text.find(entity, pos + 1)) {
    ++occurrences;
    CharSpan c{pos, pos + entity.size()};
    if (!first_raw) first_raw = c;
    if (!out.span && bounds.aligned(c.begin, c.end)) out.span = c;
  }
  if (!out.span) out.span = first_raw;
  out.ambiguous = occurrences > 1;
  return out;
}

// Last whitespace-delimited word of the interval.
CharSpan last_word(std::string_view text, CharSpan c) {
  std::size_t e = c.end;
  while (e > c.begin && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::size_t b = e;
  while (b > c.begin && !std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  return {b, e};
}

std::optional<Span> covering_tokens(std::span<const CharSpan> offsets, CharSpan c) {
  int first = -1, last = -1;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (offsets[i].begin < c.end && c.begin < offsets[i].end) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
    }
  }
  if (first < 0) return std::nullopt;
  return Span{first, last};
}

}  // namespace

std::vector<Record> parse_records(std::string_view content, std::string_view source) {
  std::vector<Record> out;
  std::size_t first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return out;
  const std::string src(source);
  if (content[first] == '[') {
    json arr;
    try {
      arr = json::parse(content);
    } catch (const json::parse_error& e) {
      throw DatasetError(src + ": invalid JSON array: " + e.what());
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(parse_record(arr[i], i, src + ": record " + std::to_string(i)));
    }
    return out;
  }
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string_view line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      const std::string where = src + ":" + std::to_string(line_no);
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DatasetError(where + ": malformed record: " + e.what());
      }
      out.push_back(parse_record(j, out.size(), where));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<Record> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_records(buf.str(), path.string());
}

void write_records(const std::filesystem::path& path, std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset " + path.string());
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["text"] = r.text;
    j["triple_list"] = json::array();
    for (const auto& t : r.triples) j["triple_list"].push_back({t[0], t[1], t[2]});
    out << j.dump() << '\n';
  }
}

Dataset align_records(std::span<const Record> records, const Tokenizer& tokenizer, SchemaMode mode,
                      const RelationSchema* fixed_schema) {
  Dataset ds;
  if (fixed_schema) ds.schema = *fixed_schema;
  ds.report.records = records.size();
  for (const auto& rec : records) {
    const Encoding full = tokenizer.encode(rec.text);
    Encoding enc = full;
    Sentence s;
    s.id = rec.id;
    s.text = rec.text;
    const bool truncated = enc.size() > kMaxSequenceLength;
    if (truncated) {
      enc.tokens.resize(kMaxSequenceLength);
      enc.ids.resize(kMaxSequenceLength);
      enc.offsets.resize(kMaxSequenceLength);
      ++ds.report.truncated_sentences;
    }
    WordBoundaries bounds(rec.text);
    auto align = [&](const std::string& entity) -> std::optional<Span> {
      Located loc = locate(rec.text, entity, bounds);
      if (!loc.span) return std::nullopt;
      if (loc.ambiguous) ++ds.report.ambiguous_alignments;
      CharSpan c = *loc.span;
      if (mode == SchemaMode::kLastWord) c = last_word(rec.text, c);
      // Alignment uses the untruncated encoding; the cut is applied afterwards.
      return covering_tokens(full.offsets, c);
    };

    bool ok = true;
    std::vector<GoldTriple> triples;
    std::vector<std::pair<int, std::string>> pending_relations;
    for (const auto& [head, rel, tail] : rec.triples) {
      auto h = align(head);
      auto t = align(tail);
      if (!h || !t) {
        ok = false;
        ds.report.warnings.push_back("sentence " + rec.id + ": cannot align entity '" + (!h ? head : tail) + "'");
        break;
      }
      int k;
      if (fixed_schema) {
        auto found = ds.schema.find(rel);
        if (!found) {
          ++ds.report.unknown_relations;
          ds.report.warnings.push_back("sentence " + rec.id + ": unknown relation '" + rel + "' dropped");
          continue;
        }
        k = *found;
      } else {
        k = -1;  // interned only once the sentence is accepted
        pending_relations.emplace_back(static_cast<int>(triples.size()), rel);
      }
      triples.push_back({*h, k, *t});
    }
    if (!ok) {
      ++ds.report.skipped_unalignable;
      continue;
    }
    for (const auto& [i, rel] : pending_relations) triples[i].relation = ds.schema.intern(rel);

    const int L = static_cast<int>(enc.size());
    for (const auto& t : triples) {
      if (t.head.end >= L || t.tail.end >= L) {
        ++ds.report.dropped_triples;
        continue;
      }
      s.gold_triples.push_back(t);
    }
    s.tokens = std::move(enc.tokens);
    s.token_ids = std::move(enc.ids);
    s.char_offsets = std::move(enc.offsets);
    ds.sentences.push_back(std::move(s));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const Tokenizer& tokenizer, SchemaMode mode,
                     const RelationSchema* fixed_schema) {
  auto records = read_records(path);
  return align_records(records, tokenizer, mode, fixed_schema);
}

std::vector<Record> to_records(std::span<const Sentence> sentences, const RelationSchema& schema) {
  std::vector<Record> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    Record r{s.id, s.text, {}};
    for (const auto& t : s.gold_triples) r.triples.push_back({s.surface(t.head), schema.name(t.relation), s.surface(t.tail)});
    out.push_back(std::move(r));
  }
  return out;
}

PatternLabel classify_pattern(std::span<const GoldTriple> triples) {
  PatternLabel label;
  std::set<GoldTriple> unique(triples.begin(), triples.end());
  std::map<std::pair<Span, Span>, std::set<int>> relations_by_pair;
  for (const auto& t : unique) {
    auto key = std::minmax(t.head, t.tail);
    relations_by_pair[{key.first, key.second}].insert(t.relation);
    if (t.head.intersects(t.tail)) label.has_hto = true;
  }
  for (const auto& [pair, rels] : relations_by_pair) {
    if (rels.size() >= 2) label.has_epo = true;
  }
  std::vector<GoldTriple> list(unique.begin(), unique.end());
  for (std::size_t i = 0; i < list.size() && !label.has_seo; ++i) {
    std::set<Span> a{list[i].head, list[i].tail};
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      std::set<Span> b{list[j].head, list[j].tail};
      std::size_t shared = 0;
      for (const auto& s : a) shared += b.count(s);
      if (shared == 1) {
        label.has_seo = true;
        break;
      }
    }
  }
  label.is_normal = !(label.has_epo || label.has_seo || label.has_hto);
  label.triple_count_bucket = static_cast<int>(std::min<std::size_t>(triples.size(), 5));
  return label;
}

DatasetStats dataset_stats(std::span<const Sentence> sentences) {
  DatasetStats st;
  st.sentences = sentences.size();
  for (const auto& s : sentences) {
    PatternLabel p = classify_pattern(s);
    st.normal += p.is_normal;
    st.epo += p.has_epo;
    st.seo += p.has_seo;
    st.hto += p.has_hto;
    ++st.by_count[p.triple_count_bucket];
    st.triples += s.gold_triples.size();
    for (const auto& t : s.gold_triples) {
      st.max_entity_length = std::max({st.max_entity_length, t.head.length(), t.tail.length()});
    }
  }
  return st;
}

}  // namespace spanlink
