#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "spanlink/corpus.hpp"
#include "spanlink/encoder.hpp"
#include "spanlink/evaluation.hpp"
#include "spanlink/linker.hpp"

namespace spanlink {

// Everything a run needs. Serialized as flat "key = value" text; every key
// can also be overridden from the command line with --key value.
struct RunConfig {
  std::string profile = "toy";
  std::string train;
  std::string valid;
  std::string test;
  std::string output_dir = "out";
  std::string vocab_file;  // word-piece vocabulary; empty = learn from train

  EncoderKind encoder = EncoderKind::kToy;
  int d = 16;
  int vocab_size = 2000;  // toy: tokenizer budget when no vocab_file is given
  int max_length = static_cast<int>(kMaxSequenceLength);
  int layers = 2;
  int radius = 2;
  int d_e = 16;
  LinkInit link_init = LinkInit::kUniform;

  int c_train = 4;
  int c_valid = 4;
  int c_infer = 4;
  int n_neg = 100;
  double theta = 0.5;

  double lr = 1e-2;
  int batch_size = 8;
  int epochs = 100;
  int patience = 0;  // 0 disables early stopping
  int eval_every = 1;
  std::uint64_t seed = 1;

  MatchMode match_mode = MatchMode::kLastWord;
  SchemaMode schema_mode = SchemaMode::kLastWord;
  std::string device = "cpu";

  // Throws ConfigError for unknown keys or unparsable values. Setting
  // "profile" resets every hyperparameter to that profile's defaults.
  void set(std::string_view key, std::string_view value);
  // Throws ConfigError when an invariant fails (e.g. lr <= 0).
  void validate() const;
  std::map<std::string, std::string> to_map() const;

  EncoderConfig encoder_config() const;
};

// Known profiles: toy, nyt-star, webnlg-star, nyt, webnlg.
RunConfig profile_defaults(std::string_view profile);

// Parses "key = value" lines; '#' starts a comment. Later keys win.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});
void save_config_file(const std::filesystem::path& path, const RunConfig& config);

// Keys that change tensor shapes; a checkpoint must agree on all of them.
inline constexpr std::string_view kShapeKeys[] = {"encoder", "d", "vocab_size", "max_length", "layers", "radius",
                                                   "d_e"};

}  // namespace spanlink
