#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanlink/tokenizer.hpp"

namespace spanlink {

inline constexpr std::size_t kMaxSequenceLength = 512;

// Inclusive token interval [start, end].
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool intersects(const Span& o) const { return start <= o.end && o.start <= end; }

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

class RelationSchema {
 public:
  RelationSchema() = default;
  // Throws ConfigError on duplicates or an empty list.
  explicit RelationSchema(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t k) const { return names_.at(k); }
  std::optional<int> find(std::string_view name) const;
  // Appends if missing; returns the index.
  int intern(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> index_;
};

struct GoldTriple {
  Span head;
  int relation = 0;
  Span tail;

  friend bool operator==(const GoldTriple&, const GoldTriple&) = default;
  friend auto operator<=>(const GoldTriple&, const GoldTriple&) = default;
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<int> token_ids;
  std::vector<CharSpan> char_offsets;
  std::vector<GoldTriple> gold_triples;

  int length() const { return static_cast<int>(tokens.size()); }
  CharSpan char_span(const Span& s) const;
  std::string surface(const Span& s) const;
};

struct PatternLabel {
  bool is_normal = true;
  bool has_epo = false;
  bool has_seo = false;
  bool has_hto = false;
  // 0 when the sentence has no gold triple, 5 stands for ">= 5".
  int triple_count_bucket = 0;

  friend bool operator==(const PatternLabel&, const PatternLabel&) = default;
};

enum class SchemaMode { kExactSpan, kLastWord };

SchemaMode parse_schema_mode(std::string_view s);
std::string_view to_string(SchemaMode m);

// One raw dataset record: text plus (head, relation, tail) surface strings.
struct Record {
  std::string id;
  std::string text;
  std::vector<std::array<std::string, 3>> triples;
};

struct LoadReport {
  std::size_t records = 0;
  std::size_t skipped_unalignable = 0;
  std::size_t ambiguous_alignments = 0;
  std::size_t truncated_sentences = 0;
  std::size_t dropped_triples = 0;  // beyond the truncation cut
  std::size_t unknown_relations = 0;  // only with a fixed schema
  std::vector<std::string> warnings;
};

struct Dataset {
  std::vector<Sentence> sentences;
  RelationSchema schema;
  LoadReport report;
};

// Parses newline-delimited or array JSON. Records without an "id" get their
// zero-based record index. Throws DatasetError naming the line on bad input.
std::vector<Record> read_records(const std::filesystem::path& path);
std::vector<Record> parse_records(std::string_view content, std::string_view source = "<memory>");
void write_records(const std::filesystem::path& path, std::span<const Record> records);

// Tokenizes records and aligns every entity string to a token span. When
// fixed_schema is given, relations are looked up in it and unknown ones are
// dropped and counted; otherwise the schema is built in first-appearance order.
Dataset align_records(std::span<const Record> records, const Tokenizer& tokenizer, SchemaMode mode,
                      const RelationSchema* fixed_schema = nullptr);

Dataset load_dataset(const std::filesystem::path& path, const Tokenizer& tokenizer, SchemaMode mode,
                     const RelationSchema* fixed_schema = nullptr);

// Back-converts aligned sentences into records using span surfaces.
std::vector<Record> to_records(std::span<const Sentence> sentences, const RelationSchema& schema);

PatternLabel classify_pattern(std::span<const GoldTriple> triples);
inline PatternLabel classify_pattern(const Sentence& s) { return classify_pattern(s.gold_triples); }

struct DatasetStats {
  std::size_t sentences = 0;
  std::size_t normal = 0;
  std::size_t epo = 0;
  std::size_t seo = 0;
  std::size_t hto = 0;
  std::array<std::size_t, 6> by_count{};  // index = triple_count_bucket
  std::size_t triples = 0;
  int max_entity_length = 0;  // in subword tokens

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(std::span<const Sentence> sentences);

}  // namespace spanlink
