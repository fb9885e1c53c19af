#pragma once

#include <cstdint>
#include <vector>

#include "spanlink/corpus.hpp"

namespace spanlink {

// Desk-scale corpus built from templated clauses over a closed entity
// vocabulary. Every sentence is generated for one overlap pattern and is
// guaranteed to classify as exactly that pattern.
struct SyntheticConfig {
  std::size_t sentences = 100;
  double normal = 1.0;
  double epo = 0.0;
  double seo = 0.0;
  double hto = 0.0;
  std::uint64_t seed = 7;
  int relations = 7;          // use the first K relations of the built-in inventory
  int entities_per_type = 0;  // 0 keeps the whole pool for each entity type
};

// The built-in relation inventory, in the order `relations` truncates it.
const std::vector<std::string>& synthetic_relation_inventory();

// Throws ConfigError for proportions that are negative or do not sum to 1,
// pools larger than the built-in vocabulary, or a pattern with non-zero
// weight that no template can realize with the enabled relations.
std::vector<Record> generate_synthetic_records(const SyntheticConfig& config);

// Records aligned with `tokenizer` under the enabled relation schema. Every
// template keeps its pattern under both annotation modes.
Dataset generate_synthetic(const SyntheticConfig& config, const Tokenizer& tokenizer,
                           SchemaMode mode = SchemaMode::kExactSpan);

}  // namespace spanlink
