#include "spanlink/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "spanlink/candidates.hpp"
#include "spanlink/error.hpp"

namespace spanlink {

namespace {

enum Rel { kBornIn, kWorksFor, kLocatedIn, kDiedIn, kFounded, kCapitalOf, kContains, kRelCount };

enum class Kind { kPerson, kCity, kCountry, kOrg, kUniversityOfCity, kPortOfCity, kBankOfCountry };

enum class Pattern { kNormal, kEpo, kSeo, kHto };

const std::vector<std::string> kFirstNames = {"Alice", "Bruno", "Chen", "Dana", "Emil",
                                              "Farah", "Goran", "Hana", "Igor", "Julia"};
const std::vector<std::string> kLastNames = {"Moreau", "Silva", "Novak", "Tanaka", "Weber",
                                             "Okafor", "Lind",   "Rossi", "van Dijk", "de Luca"};
const std::vector<std::string> kCities = {"Paris", "Lyon", "Berlin", "Munich", "Osaka", "Kyoto",
                                          "Lagos", "Porto", "Lima",  "Oslo",   "San Diego", "Rio de Janeiro"};
const std::vector<std::string> kCountries = {"France", "Germany", "Japan", "Nigeria", "Portugal",
                                             "Peru",   "Norway",  "Brazil", "Canada", "Chile"};
const std::vector<std::string> kOrgs = {"Acme Corp", "Globex",    "Initech",        "Umbrella Labs", "Stark Industries",
                                        "Hooli",     "Soylent",   "Tyrell Corporation", "Wayne Enterprises", "Cyberdyne"};

const std::vector<std::string> kPrefixes = {"", "In 1998 ,", "Last year ,", "According to reports ,", "Reportedly ,"};
const std::vector<std::string> kJoiners = {", while", "; meanwhile ,", "and"};

// Entity reference inside a template: the slot's full string, or the base
// entity nested inside a compound slot.
struct Ref {
  int slot;
  bool inner = false;
};

struct TripleSpec {
  Ref head;
  Rel relation;
  Ref tail;
};

struct Template {
  Pattern pattern;
  std::string text;  // "{0}", "{1}", ... mark slots; no final period
  std::vector<Kind> slots;
  std::vector<TripleSpec> triples;
};

const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {Pattern::kNormal, "{0} was born in {1}", {Kind::kPerson, Kind::kCity}, {{{0}, kBornIn, {1}}}},
      {Pattern::kNormal, "{0} works for {1}", {Kind::kPerson, Kind::kOrg}, {{{0}, kWorksFor, {1}}}},
      {Pattern::kNormal, "{0} is a city in {1}", {Kind::kCity, Kind::kCountry}, {{{0}, kLocatedIn, {1}}}},
      {Pattern::kNormal, "{0} died in {1}", {Kind::kPerson, Kind::kCity}, {{{0}, kDiedIn, {1}}}},
      {Pattern::kNormal, "{0} founded {1}", {Kind::kPerson, Kind::kOrg}, {{{0}, kFounded, {1}}}},

      {Pattern::kEpo, "{0} was born and died in {1}", {Kind::kPerson, Kind::kCity},
       {{{0}, kBornIn, {1}}, {{0}, kDiedIn, {1}}}},
      {Pattern::kEpo, "{0} founded and works for {1}", {Kind::kPerson, Kind::kOrg},
       {{{0}, kFounded, {1}}, {{0}, kWorksFor, {1}}}},
      {Pattern::kEpo, "{0} is the capital of {1}", {Kind::kCity, Kind::kCountry},
       {{{0}, kCapitalOf, {1}}, {{1}, kContains, {0}}}},

      {Pattern::kSeo, "{0} was born in {1} and works for {2}", {Kind::kPerson, Kind::kCity, Kind::kOrg},
       {{{0}, kBornIn, {1}}, {{0}, kWorksFor, {2}}}},
      {Pattern::kSeo, "{0} and {1} were born in {2}", {Kind::kPerson, Kind::kPerson, Kind::kCity},
       {{{0}, kBornIn, {2}}, {{1}, kBornIn, {2}}}},
      {Pattern::kSeo, "{0} works for {1} , a company in {2}", {Kind::kPerson, Kind::kOrg, Kind::kCity},
       {{{0}, kWorksFor, {1}}, {{1}, kLocatedIn, {2}}}},
      {Pattern::kSeo, "{0} and {1} are cities in {2}", {Kind::kCity, Kind::kCity, Kind::kCountry},
       {{{0}, kLocatedIn, {2}}, {{1}, kLocatedIn, {2}}}},
      {Pattern::kSeo, "{0} died in {1} , a city in {2}", {Kind::kPerson, Kind::kCity, Kind::kCountry},
       {{{0}, kDiedIn, {1}}, {{1}, kLocatedIn, {2}}}},

      // The compound ends with the inner entity, so head and tail still
      // overlap when only last words are annotated.
      {Pattern::kHto, "the {0} opened a new campus", {Kind::kUniversityOfCity}, {{{0}, kLocatedIn, {0, true}}}},
      {Pattern::kHto, "the {0} handled record cargo", {Kind::kPortOfCity}, {{{0}, kLocatedIn, {0, true}}}},
      {Pattern::kHto, "the {0} raised interest rates", {Kind::kBankOfCountry}, {{{0}, kLocatedIn, {0, true}}}},
  };
  return t;
}

bool enabled(const Template& t, int relations) {
  return std::all_of(t.triples.begin(), t.triples.end(), [&](const TripleSpec& s) { return s.relation < relations; });
}

struct Pools {
  std::vector<std::string> persons, cities, countries, orgs;

  const std::vector<std::string>& base(Kind k) const {
    switch (k) {
      case Kind::kPerson:
        return persons;
      case Kind::kCity:
      case Kind::kUniversityOfCity:
      case Kind::kPortOfCity:
        return cities;
      case Kind::kCountry:
      case Kind::kBankOfCountry:
        return countries;
      case Kind::kOrg:
        return orgs;
    }
    return persons;
  }
};

std::string compose(Kind k, const std::string& base) {
  switch (k) {
    case Kind::kUniversityOfCity:
      return "University of " + base;
    case Kind::kPortOfCity:
      return "Port of " + base;
    case Kind::kBankOfCountry:
      return "Bank of " + base;
    default:
      return base;
  }
}

std::string substitute(std::string text, const std::vector<std::string>& fills) {
  for (std::size_t i = 0; i < fills.size(); ++i) {
    const std::string key = "{" + std::to_string(i) + "}";
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key)) text.replace(pos, key.size(), fills[i]);
  }
  return text;
}

// Fills one template with base entities not yet used in the sentence.
void realize(const Template& t, const Pools& pools, std::set<std::string>& used, std::mt19937_64& rng,
             std::string& clause, std::vector<std::array<std::string, 3>>& triples,
             const std::vector<std::string>& relation_names) {
  std::vector<std::string> bases, fills;
  for (Kind k : t.slots) {
    const auto& pool = pools.base(k);
    std::vector<const std::string*> free;
    for (const auto& e : pool) {
      if (!used.count(e)) free.push_back(&e);
    }
    if (free.empty()) throw ConfigError("entity pool too small for the requested templates");
    const std::string& pick = *free[uniform_index(rng, free.size())];
    used.insert(pick);
    bases.push_back(pick);
    fills.push_back(compose(k, pick));
  }
  clause = substitute(t.text, fills);
  auto name = [&](Ref r) { return r.inner ? bases[r.slot] : fills[r.slot]; };
  for (const auto& s : t.triples) triples.push_back({name(s.head), relation_names[s.relation], name(s.tail)});
}

std::vector<std::size_t> allocate(std::size_t n, const std::array<double, 4>& weights) {
  // Largest-remainder apportionment, ties toward the earlier pattern.
  std::array<std::size_t, 4> counts{};
  std::array<std::pair<double, int>, 4> rema;
  std::size_t assigned = 0;
  for (int i = 0; i < 4; ++i) {
    double exact = weights[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    rema[i] = {exact - std::floor(exact), -i};
  }
  std::sort(rema.begin(), rema.end(), std::greater<>());
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[-rema[r % 4].second];
  std::vector<std::size_t> plan;
  for (int i = 0; i < 4; ++i) plan.insert(plan.end(), counts[i], static_cast<std::size_t>(i));
  return plan;
}

}  // namespace

const std::vector<std::string>& synthetic_relation_inventory() {
  static const std::vector<std::string> names = {"born_in", "works_for", "located_in", "died_in",
                                                 "founded", "capital_of", "contains"};
  return names;
}

std::vector<Record> generate_synthetic_records(const SyntheticConfig& config) {
  const std::array<double, 4> weights = {config.normal, config.epo, config.seo, config.hto};
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw ConfigError("pattern proportions must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("pattern proportions must sum to 1");
  if (config.relations < 1 || config.relations > kRelCount) {
    throw ConfigError("synthetic relation count must lie in [1, " + std::to_string(kRelCount) + "]");
  }

  Pools pools;
  for (const auto& f : kFirstNames) {
    for (const auto& l : kLastNames) pools.persons.push_back(f + " " + l);
  }
  pools.cities = kCities;
  pools.countries = kCountries;
  pools.orgs = kOrgs;
  if (config.entities_per_type < 0) throw ConfigError("entities_per_type must be non-negative");
  if (config.entities_per_type > 0) {
    for (auto* pool : {&pools.persons, &pools.cities, &pools.countries, &pools.orgs}) {
      if (static_cast<std::size_t>(config.entities_per_type) > pool->size()) {
        throw ConfigError("entities_per_type " + std::to_string(config.entities_per_type) +
                          " exceeds the built-in vocabulary of " + std::to_string(pool->size()));
      }
      pool->resize(static_cast<std::size_t>(config.entities_per_type));
    }
  }

  const auto& names = synthetic_relation_inventory();
  std::array<std::vector<const Template*>, 4> by_pattern;
  for (const auto& t : templates()) {
    if (enabled(t, config.relations)) by_pattern[static_cast<int>(t.pattern)].push_back(&t);
  }
  static const char* kPatternNames[] = {"Normal", "EPO", "SEO", "HTO"};
  for (int p = 0; p < 4; ++p) {
    if (weights[p] > 0 && by_pattern[p].empty()) {
      throw ConfigError(std::string("pattern ") + kPatternNames[p] + " is infeasible with " +
                        std::to_string(config.relations) + " relation(s)");
    }
  }

  std::mt19937_64 rng = derive_rng(config.seed, "synthetic");
  std::vector<std::size_t> plan = allocate(config.sentences, weights);
  for (std::size_t i = plan.size(); i > 1; --i) std::swap(plan[i - 1], plan[uniform_index(rng, i)]);

  std::vector<Record> out;
  out.reserve(plan.size());
  for (std::size_t n = 0; n < plan.size(); ++n) {
    const auto& candidates = by_pattern[plan[n]];
    std::set<std::string> used;
    Record rec;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", n);
    rec.id = id;
    std::string clause;
    realize(*candidates[uniform_index(rng, candidates.size())], pools, used, rng, clause, rec.triples, names);
    if (plan[n] == 0 && uniform_index(rng, 5) < 2) {
      // Second clause with fresh entities keeps the sentence Normal.
      std::string second;
      realize(*candidates[uniform_index(rng, candidates.size())], pools, used, rng, second, rec.triples, names);
      clause += " " + kJoiners[uniform_index(rng, kJoiners.size())] + " " + second;
    }
    const std::string& prefix = kPrefixes[uniform_index(rng, kPrefixes.size())];
    std::string text = prefix.empty() ? clause : prefix + " " + clause;
    text += " .";
    if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 'a' + 'A');
    rec.text = std::move(text);
    out.push_back(std::move(rec));
  }
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config, const Tokenizer& tokenizer, SchemaMode mode) {
  auto records = generate_synthetic_records(config);
  const auto& inventory = synthetic_relation_inventory();
  RelationSchema schema(std::vector<std::string>(inventory.begin(), inventory.begin() + config.relations));
  return align_records(records, tokenizer, mode, &schema);
}

}  // namespace spanlink
