// spanlink command-line front end: train, predict, eval, sweep-theta,
// analyze, bench, synth.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spanlink/config.hpp"
#include "spanlink/corpus.hpp"
#include "spanlink/decoder.hpp"
#include "spanlink/error.hpp"
#include "spanlink/evaluation.hpp"
#include "spanlink/model.hpp"
#include "spanlink/synthetic.hpp"
#include "spanlink/tokenizer.hpp"
#include "spanlink/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace spanlink;

namespace {

const char* const kConfigKeys[] = {
    "profile", "train",      "valid",      "test",    "output_dir", "vocab_file",  "encoder",
    "d",       "vocab_size", "max_length", "layers",  "radius",     "d_e",         "link_init",
    "c_train", "c_valid",    "c_infer",    "n_neg",   "theta",      "lr",          "batch_size",
    "epochs",  "patience",   "eval_every", "seed",    "match_mode", "schema_mode", "device"};

// Shared by every subcommand that resolves a RunConfig.
struct ConfigOptions {
  std::string config_file;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "config file of 'key = value' lines")->check(CLI::ExistingFile);
    for (const char* key : kConfigKeys) cmd->add_option(std::string("--") + key, flags[key], "override " + std::string(key));
  }

  // Base, then config file, then environment, then flags. A --profile flag
  // selects the base so that it does not wipe the file's settings.
  RunConfig resolve(RunConfig base) const {
    auto given = [&](const std::string& key) -> const std::string* {
      auto it = flags.find(key);
      return it != flags.end() && !it->second.empty() ? &it->second : nullptr;
    };
    if (const auto* p = given("profile")) base = profile_defaults(*p);
    RunConfig cfg = config_file.empty() ? base : load_config_file(config_file, base);
    if (const char* v = std::getenv("SPANLINK_OUTPUT_DIR")) cfg.set("output_dir", v);
    if (const char* v = std::getenv("SPANLINK_SEED")) cfg.set("seed", v);
    if (const char* v = std::getenv("SPANLINK_DEVICE")) cfg.set("device", v);
    for (const char* key : kConfigKeys) {
      if (std::string_view(key) == "profile") continue;
      if (const auto* v = given(key)) cfg.set(key, *v);
    }
    cfg.validate();
    return cfg;
  }
};

RunConfig from_map(const std::map<std::string, std::string>& m) {
  RunConfig cfg;
  if (auto it = m.find("profile"); it != m.end()) cfg.set("profile", it->second);
  for (const auto& [k, v] : m)
    if (k != "profile") cfg.set(k, v);
  return cfg;
}

std::string require_path(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("no ") + what + " given");
  return value;
}

void require_backend(const RunConfig& cfg) {
  if (cfg.encoder != EncoderKind::kToy)
    throw CapabilityError("encoder '" + std::string(to_string(cfg.encoder)) +
                          "' needs a pretrained backend, and none is linked into this build");
}

void report_load(const std::string& label, const LoadReport& r) {
  if (r.skipped_unalignable || r.truncated_sentences || r.unknown_relations || r.ambiguous_alignments)
    std::cerr << "warning: " << label << ": " << r.skipped_unalignable << " skipped (unalignable), "
              << r.truncated_sentences << " truncated, " << r.unknown_relations << " unknown relation(s), "
              << r.ambiguous_alignments << " ambiguous alignment(s)\n";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json to_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
          {"matched", p.matched},     {"predicted", p.predicted}, {"gold", p.gold}};
}

void print_prf(const std::string& label, const Prf& p) {
  std::cout << std::left << std::setw(10) << label << std::right << std::fixed << std::setprecision(4) << " P "
            << p.precision << "  R " << p.recall << "  F1 " << p.f1 << "  (" << p.matched << "/" << p.predicted
            << " pred, " << p.gold << " gold)\n";
}

// Shape-determining keys must agree between the checkpoint and the resolved
// run; anything else (theta, c_infer, ...) may legitimately change.
void check_shape_keys(const RunConfig& cfg, const std::map<std::string, std::string>& stored) {
  const auto now = cfg.to_map();
  std::string diff;
  for (auto key : kShapeKeys) {
    const std::string k(key);
    auto it = stored.find(k);
    if (it == stored.end()) continue;
    if (now.at(k) != it->second) diff += (diff.empty() ? "" : ", ") + k + " " + now.at(k) + " vs checkpoint " + it->second;
  }
  if (!diff.empty()) throw ShapeError("configuration does not match checkpoint: " + diff);
}

struct Loaded {
  Checkpoint ckpt;
  RunConfig cfg;
};

Loaded load_model(const std::string& path, const ConfigOptions& opts) {
  Loaded l{load_checkpoint(require_path(path, "--checkpoint")), {}};
  l.cfg = opts.resolve(from_map(l.ckpt.run_config));
  check_shape_keys(l.cfg, l.ckpt.run_config);
  require_backend(l.cfg);
  return l;
}

Dataset load_for_model(const Model& model, const RunConfig& cfg, const std::string& path, const std::string& label) {
  Dataset ds = load_dataset(path, model.tokenizer(), cfg.schema_mode, &model.schema());
  report_load(label, ds.report);
  return ds;
}

// Gold is aligned in whitespace-word space; evaluation works on characters.
std::vector<EvalSentence> load_gold(const std::string& path, const RunConfig& cfg) {
  Dataset ds = load_dataset(path, Tokenizer::word_level(), cfg.schema_mode);
  report_load("gold", ds.report);
  return to_eval(ds.sentences, ds.schema);
}

std::vector<EvalSentence> to_eval(const PredictionFile& f) {
  std::vector<EvalSentence> out;
  out.reserve(f.sentences.size());
  for (const auto& s : f.sentences) out.push_back(spanlink::to_eval(s));
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      grid.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("bad grid value '" + item + "'");
    }
  }
  if (grid.empty()) throw ConfigError("empty theta grid");
  return grid;
}

// --------------------------------------------------------------------------

int cmd_train(const ConfigOptions& opts) {
  RunConfig cfg = opts.resolve(RunConfig{});
  require_backend(cfg);
  const auto records = read_records(require_path(cfg.train, "train set (--train)"));

  Tokenizer tok;
  if (!cfg.vocab_file.empty()) {
    tok = Tokenizer::from_vocab_file(cfg.vocab_file);
  } else {
    std::vector<std::string> texts;
    texts.reserve(records.size());
    for (const auto& r : records) texts.push_back(r.text);
    tok = Tokenizer::train(texts, static_cast<std::size_t>(cfg.vocab_size));
  }
  cfg.vocab_size = static_cast<int>(tok.vocab_size());

  Dataset train = align_records(records, tok, cfg.schema_mode);
  report_load("train", train.report);
  if (train.sentences.empty()) throw DatasetError("train set has no usable sentences");
  Dataset valid;
  if (!cfg.valid.empty()) {
    valid = load_dataset(cfg.valid, tok, cfg.schema_mode, &train.schema);
    report_load("valid", valid.report);
  }
  if (cfg.c_infer != cfg.c_train)
    std::cerr << "warning: c_infer " << cfg.c_infer << " differs from c_train " << cfg.c_train << '\n';

  const fs::path out = cfg.output_dir;
  ensure_dir(out);
  std::ofstream log(out / "train_log.jsonl");
  if (!log) throw ConfigError("cannot write " + (out / "train_log.jsonl").string());

  TrainResult result = train_model(cfg, train.sentences, valid.sentences, tok, train.schema, &log);
  save_checkpoint(out / "model.ckpt", *result.model, cfg.to_map());
  save_config_file(out / "config.txt", cfg);

  std::cout << "trained " << train.sentences.size() << " sentences, " << train.schema.size() << " relations, "
            << result.steps << " steps, final loss " << result.final_loss << '\n';
  if (result.best_valid_f1 >= 0)
    std::cout << "best valid F1 " << std::fixed << std::setprecision(4) << result.best_valid_f1 << " at epoch "
              << result.best_epoch << '\n';
  std::cout << "checkpoint " << (out / "model.ckpt").string() << '\n';
  return 0;
}

int cmd_predict(const ConfigOptions& opts, const std::string& checkpoint, std::string input, std::string output) {
  Loaded l = load_model(checkpoint, opts);
  const Model& model = *l.ckpt.model;
  if (input.empty()) input = require_path(l.cfg.test, "input (--input or --test)");
  if (l.cfg.c_infer != l.cfg.c_train)
    std::cerr << "warning: c_infer " << l.cfg.c_infer << " differs from c_train " << l.cfg.c_train << '\n';

  Dataset ds = load_for_model(model, l.cfg, input, "input");
  const auto preds = predict_all(model, ds.sentences, l.cfg.c_infer, l.cfg.theta);
  const fs::path out = output.empty() ? fs::path(l.cfg.output_dir) / "predictions.json" : fs::path(output);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  write_predictions(out, preds, ds.sentences, model.schema(), l.cfg.theta);

  std::size_t n = 0;
  for (const auto& p : preds) n += p.triples.size();
  std::cout << "predicted " << n << " triples over " << preds.size() << " sentences -> " << out.string() << '\n';
  return 0;
}

int cmd_eval(const ConfigOptions& opts, std::string gold_path, const std::string& pred_path, bool splits,
             bool subtasks, bool taxonomy, std::string report_path) {
  RunConfig cfg = opts.resolve(RunConfig{});
  if (gold_path.empty()) gold_path = require_path(cfg.test, "gold set (--gold or --test)");
  const auto golds = load_gold(gold_path, cfg);
  const auto preds = to_eval(read_predictions(require_path(pred_path, "--predictions")));

  json report;
  report["match_mode"] = std::string(to_string(cfg.match_mode));
  const EvalReport overall = micro_prf(preds, golds, cfg.match_mode);
  report["overall"] = to_json(overall.overall);
  print_prf("overall", overall.overall);

  if (splits) {
    for (auto by : {SplitBy::kPattern, SplitBy::kTripleCount}) {
      const EvalReport r = split_report(preds, golds, by, cfg.match_mode);
      for (const auto& name : kSplitNames) {
        auto it = r.per_split.find(name);
        if (it == r.per_split.end()) continue;
        report["splits"][name] = to_json(it->second);
        print_prf(name, it->second);
      }
    }
  }
  if (subtasks) {
    const SubtaskReport s = subtask_report(preds, golds, cfg.match_mode);
    report["subtasks"] = {{"pairs", to_json(s.pairs)}, {"relations", to_json(s.relations)}, {"triples", to_json(s.triples)}};
    print_prf("(h,t)", s.pairs);
    print_prf("r", s.relations);
    print_prf("(h,r,t)", s.triples);
  }
  if (taxonomy) {
    const ErrorTaxonomy t = error_taxonomy(preds, golds, cfg.match_mode);
    report["taxonomy"] = {{"span_splitting", t.span_splitting},
                          {"entity_not_found", t.entity_not_found},
                          {"entity_role", t.entity_role},
                          {"total", t.total()}};
    std::cout << "errors: span splitting " << t.span_splitting << ", entity not found " << t.entity_not_found
              << ", entity role " << t.entity_role << '\n';
  }
  const fs::path out = report_path.empty() ? fs::path(cfg.output_dir) / "eval.json" : fs::path(report_path);
  write_json(out, report);
  return 0;
}

int cmd_sweep(const ConfigOptions& opts, std::string gold_path, const std::string& scores, const std::string& checkpoint,
              std::string input, const std::string& grid_text, std::string report_path) {
  const auto grid = parse_grid(grid_text);
  if (scores.empty() == checkpoint.empty()) throw ConfigError("give exactly one of --scores or --checkpoint");

  PredictionFile scored;
  RunConfig cfg;
  if (!scores.empty()) {
    cfg = opts.resolve(RunConfig{});
    scored = read_predictions(scores);
  } else {
    Loaded l = load_model(checkpoint, opts);
    cfg = l.cfg;
    if (input.empty()) input = require_path(cfg.valid, "input (--input or --valid)");
    // Score once at the lowest grid point; every higher threshold is a filter.
    const double floor = *std::min_element(grid.begin(), grid.end());
    Dataset ds = load_for_model(*l.ckpt.model, cfg, input, "input");
    const auto preds = predict_all(*l.ckpt.model, ds.sentences, cfg.c_infer, floor);
    const fs::path tmp = fs::path(cfg.output_dir) / "sweep_scores.json";
    ensure_dir(cfg.output_dir);
    write_predictions(tmp, preds, ds.sentences, l.ckpt.model->schema(), floor);
    scored = read_predictions(tmp);
    if (gold_path.empty()) gold_path = input;
  }
  if (gold_path.empty()) gold_path = require_path(cfg.valid, "gold set (--gold or --valid)");
  const auto golds = load_gold(gold_path, cfg);
  const ThetaSweep sweep = sweep_theta(golds, scored, grid, cfg.match_mode);

  json report;
  for (const auto& pt : sweep.curve) {
    json p = to_json(pt.prf);
    p["theta"] = pt.theta;
    report["curve"].push_back(p);
    std::ostringstream label;
    label << "theta " << std::fixed << std::setprecision(3) << pt.theta;
    print_prf(label.str(), pt.prf);
  }
  report["best_theta"] = sweep.best_theta;
  report["best_f1"] = sweep.best_f1;
  std::cout << "best theta " << sweep.best_theta << " (F1 " << std::setprecision(4) << sweep.best_f1 << ")\n";
  const fs::path out = report_path.empty() ? fs::path(cfg.output_dir) / "theta_sweep.json" : fs::path(report_path);
  write_json(out, report);
  return 0;
}

void write_histogram_svg(const fs::path& path, const LengthDistribution& dist) {
  if (dist.histogram.empty()) throw DatasetError("no gold entities to plot");
  const int max_len = dist.histogram.rbegin()->first;
  std::size_t peak = 0;
  for (const auto& [len, n] : dist.histogram) peak = std::max(peak, n);
  const double w = 640, h = 320, left = 50, bottom = 40, top = 20;
  const double bar = (w - left - 10) / max_len;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<text x=\"" << w / 2 << "\" y=\"" << h - 5 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << "entity length (tokens)</text>\n"
      << "<text x=\"12\" y=\"" << top + 10 << "\" font-size=\"12\">" << peak << "</text>\n";
  for (const auto& [len, n] : dist.histogram) {
    const double bh = (h - bottom - top) * static_cast<double>(n) / static_cast<double>(peak);
    const double x = left + (len - 1) * bar;
    out << "<rect x=\"" << x << "\" y=\"" << h - bottom - bh << "\" width=\"" << std::max(1.0, bar - 2)
        << "\" height=\"" << bh << "\" fill=\"steelblue\"/>\n"
        << "<text x=\"" << x + bar / 2 << "\" y=\"" << h - bottom + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">" << len << "</text>\n";
  }
  out << "</svg>\n";
}

int cmd_analyze(const ConfigOptions& opts, std::string input, const std::string& histogram,
                const std::string& report_path) {
  RunConfig cfg = opts.resolve(RunConfig{});
  if (input.empty()) input = require_path(cfg.train, "input (--input or --train)");
  const Tokenizer tok = cfg.vocab_file.empty() ? Tokenizer::word_level() : Tokenizer::from_vocab_file(cfg.vocab_file);
  Dataset ds = load_dataset(input, tok, cfg.schema_mode);
  report_load("input", ds.report);

  const DatasetStats st = dataset_stats(ds.sentences);
  const LengthDistribution dist = length_distribution(ds.sentences);
  std::cout << "sentences " << ds.sentences.size() << ", relations " << ds.schema.size() << '\n'
            << "normal " << st.normal << ", EPO " << st.epo << ", SEO " << st.seo << ", HTO " << st.hto
            << ", triples " << st.triples << '\n'
            << "by triple count: N=1 " << st.by_count[1] << ", N=2 " << st.by_count[2] << ", N=3 " << st.by_count[3]
            << ", N=4 " << st.by_count[4] << ", N>=5 " << st.by_count[5] << '\n'
            << "entity lengths (" << (cfg.vocab_file.empty() ? "words" : "sub-words") << "), " << dist.total
            << " distinct entities:\n";
  for (const auto& [len, n] : dist.histogram) std::cout << "  " << len << ": " << n << '\n';
  for (const auto& [pct, c] : dist.coverage) std::cout << "  C for " << pct << "% coverage: " << c << '\n';

  if (!histogram.empty()) write_histogram_svg(histogram, dist);
  if (!report_path.empty()) {
    json j;
    j["sentences"] = ds.sentences.size();
    j["relations"] = ds.schema.size();
    j["patterns"] = {{"normal", st.normal}, {"epo", st.epo}, {"seo", st.seo}, {"hto", st.hto}};
    j["triples"] = st.triples;
    j["by_count"] = {{"1", st.by_count[1]}, {"2", st.by_count[2]}, {"3", st.by_count[3]}, {"4", st.by_count[4]},
                     {">=5", st.by_count[5]}};
    for (const auto& [len, n] : dist.histogram) j["length_histogram"][std::to_string(len)] = n;
    for (const auto& [pct, c] : dist.coverage) j["coverage"][std::to_string(pct)] = c;
    write_json(report_path, j);
  }
  return 0;
}

int cmd_bench(const ConfigOptions& opts, const std::string& checkpoint, std::string input, int repetitions,
              int warmup, const std::string& report_path) {
  if (repetitions < 1) throw RangeError("--repetitions must be at least 1");
  Loaded l = load_model(checkpoint, opts);
  if (input.empty()) input = require_path(l.cfg.test, "input (--input or --test)");
  Dataset ds = load_for_model(*l.ckpt.model, l.cfg, input, "input");
  const TimingReport t = timing_harness(*l.ckpt.model, ds.sentences, repetitions, l.cfg.c_infer, l.cfg.theta, warmup);
  std::cout << std::fixed << std::setprecision(4) << t.mean_ms << " ms/sentence (sd " << t.stddev_ms << ", "
            << t.repetitions << " repetitions over " << t.sentences << " sentences, c_infer " << l.cfg.c_infer
            << ")\n";
  if (!report_path.empty())
    write_json(report_path, {{"mean_ms", t.mean_ms},
                             {"stddev_ms", t.stddev_ms},
                             {"repetitions", t.repetitions},
                             {"sentences", t.sentences},
                             {"c_infer", l.cfg.c_infer}});
  return 0;
}

int cmd_synth(const ConfigOptions& opts, SyntheticConfig sc, double valid_frac, double test_frac) {
  RunConfig cfg = opts.resolve(RunConfig{});
  sc.seed = cfg.seed;
  if (valid_frac < 0 || test_frac < 0 || valid_frac + test_frac >= 1)
    throw ConfigError("valid and test fractions must be non-negative and sum to less than 1");
  const auto records = generate_synthetic_records(sc);
  const auto n = records.size();
  const auto n_valid = static_cast<std::size_t>(valid_frac * static_cast<double>(n));
  const auto n_test = static_cast<std::size_t>(test_frac * static_cast<double>(n));
  const auto n_train = n - n_valid - n_test;
  const fs::path out = cfg.output_dir;
  ensure_dir(out);
  auto slice = [&](std::size_t from, std::size_t count) {
    return std::span<const Record>(records).subspan(from, count);
  };
  write_records(out / "train.json", slice(0, n_train));
  write_records(out / "valid.json", slice(n_train, n_valid));
  write_records(out / "test.json", slice(n_train + n_valid, n_test));
  std::cout << "wrote " << n_train << " train, " << n_valid << " valid, " << n_test << " test records to "
            << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanlink: span-level joint entity and relation extraction"};
  app.require_subcommand(1);

  ConfigOptions train_opts, predict_opts, eval_opts, sweep_opts, analyze_opts, bench_opts, synth_opts;
  std::string checkpoint, input, output, gold, predictions, scores, report, histogram;
  std::string grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  bool splits = false, subtasks = false, taxonomy = false;
  int repetitions = 5, warmup = 1;
  SyntheticConfig sc;
  double valid_frac = 0.1, test_frac = 0.1;

  auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
  train_opts.attach(train);

  auto* predict = app.add_subcommand("predict", "write predictions for a dataset");
  predict_opts.attach(predict);
  predict->add_option("--checkpoint", checkpoint)->required();
  predict->add_option("--input", input, "dataset to predict (default: test)");
  predict->add_option("--output", output, "prediction file (default: <output_dir>/predictions.json)");

  auto* eval = app.add_subcommand("eval", "score a prediction file against gold");
  eval_opts.attach(eval);
  eval->add_option("--gold", gold, "gold dataset (default: test)");
  eval->add_option("--predictions", predictions)->required();
  eval->add_flag("--splits", splits, "per-pattern and per-count breakdown");
  eval->add_flag("--subtasks", subtasks, "(h,t), r and (h,r,t) scores");
  eval->add_flag("--taxonomy", taxonomy, "classify missed gold entities");
  eval->add_option("--report", report, "JSON report (default: <output_dir>/eval.json)");

  auto* sweep = app.add_subcommand("sweep-theta", "pick the decision threshold on validation data");
  sweep_opts.attach(sweep);
  sweep->add_option("--gold", gold, "gold dataset (default: valid)");
  sweep->add_option("--scores", scores, "prediction file scored at or below the smallest grid value");
  sweep->add_option("--checkpoint", checkpoint, "re-score with this checkpoint instead");
  sweep->add_option("--input", input, "dataset to score with --checkpoint (default: valid)");
  sweep->add_option("--grid", grid, "comma-separated thresholds");
  sweep->add_option("--report", report, "JSON report (default: <output_dir>/theta_sweep.json)");

  auto* analyze = app.add_subcommand("analyze", "corpus statistics and entity length distribution");
  analyze_opts.attach(analyze);
  analyze->add_option("--input", input, "dataset (default: train)");
  analyze->add_option("--histogram", histogram, "write an SVG histogram of entity lengths");
  analyze->add_option("--report", report, "JSON report");

  auto* bench = app.add_subcommand("bench", "time per-sentence inference");
  bench_opts.attach(bench);
  bench->add_option("--checkpoint", checkpoint)->required();
  bench->add_option("--input", input, "dataset (default: test)");
  bench->add_option("--repetitions", repetitions);
  bench->add_option("--warmup", warmup);
  bench->add_option("--report", report, "JSON report");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_opts.attach(synth);
  synth->add_option("--sentences", sc.sentences);
  synth->add_option("--normal", sc.normal);
  synth->add_option("--epo", sc.epo);
  synth->add_option("--seo", sc.seo);
  synth->add_option("--hto", sc.hto);
  synth->add_option("--relations", sc.relations);
  synth->add_option("--entities-per-type", sc.entities_per_type);
  synth->add_option("--valid-fraction", valid_frac);
  synth->add_option("--test-fraction", test_frac);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::cerr << "error: usage: " << msg << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*train) return cmd_train(train_opts);
    if (*predict) return cmd_predict(predict_opts, checkpoint, input, output);
    if (*eval) return cmd_eval(eval_opts, gold, predictions, splits, subtasks, taxonomy, report);
    if (*sweep) return cmd_sweep(sweep_opts, gold, scores, checkpoint, input, grid, report);
    if (*analyze) return cmd_analyze(analyze_opts, input, histogram, report);
    if (*bench) return cmd_bench(bench_opts, checkpoint, input, repetitions, warmup, report);
    if (*synth) return cmd_synth(synth_opts, sc, valid_frac, test_frac);
  } catch (const spanlink::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
