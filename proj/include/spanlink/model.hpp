#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "spanlink/candidates.hpp"
#include "spanlink/encoder.hpp"
#include "spanlink/linker.hpp"
#include "spanlink/tokenizer.hpp"

namespace spanlink {

struct ModelParams {
  EncoderParams encoder;
  LinkerParams linker;

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    EncoderParams::visit(self.encoder, f);
    LinkerParams::visit(self.linker, f);
  }

  ModelParams zeros_like() const;
  std::size_t parameter_count() const;
};

struct ModelConfig {
  EncoderConfig encoder;
  int entity_width = 16;  // d_e

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Encoder + linker + the tokenizer and relation schema they were trained with.
class Model {
 public:
  Model(ModelConfig config, Tokenizer tokenizer, RelationSchema schema, std::uint64_t seed,
        LinkInit link_init = LinkInit::kUniform);
  Model(ModelConfig config, Tokenizer tokenizer, RelationSchema schema, ModelParams params);

  const ModelConfig& config() const { return config_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  const RelationSchema& schema() const { return schema_; }
  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  int relations() const { return static_cast<int>(schema_.size()); }

  void set_adapter(std::shared_ptr<const PretrainedAdapter> adapter) { adapter_ = std::move(adapter); }
  bool trains_encoder() const { return config_.encoder.kind == EncoderKind::kToy; }

  Matrix encode(std::span<const int> ids, EncoderCache* cache = nullptr) const;

  // Full forward pass over a candidate set.
  LinkScoreTensor score(const Sentence& sentence, const CandidateSet& candidates) const;

  // Loss of one sentence; adds scale * dLoss/dparams into grad.
  double loss_and_grad(const Sentence& sentence, const CandidateSet& candidates, double scale,
                       ModelParams& grad) const;
  double loss(const Sentence& sentence, const CandidateSet& candidates) const;

  // Throws ShapeError naming the first tensor whose shape disagrees with config.
  void check_shapes() const;

 private:
  ModelConfig config_;
  Tokenizer tokenizer_;
  RelationSchema schema_;
  ModelParams params_;
  std::shared_ptr<const PretrainedAdapter> adapter_;
};

// Self-describing binary archive: magic, JSON header (configs, tokenizer
// pieces, relation names, run settings, tensor table), then every tensor as
// row-major little-endian float64. Reload is bit-exact.
struct Checkpoint {
  std::unique_ptr<Model> model;
  std::map<std::string, std::string> run_config;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::map<std::string, std::string>& run_config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace spanlink
