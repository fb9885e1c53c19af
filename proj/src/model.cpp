#include "spanlink/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "spanlink/error.hpp"

namespace spanlink {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  ModelParams::visit(z, [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  ModelParams::visit(*this, [&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

namespace {

ModelParams fresh_params(const ModelConfig& config, int relations, std::uint64_t seed, LinkInit link_init) {
  config.encoder.validate();
  if (config.entity_width <= 0) throw ConfigError("entity width must be positive");
  std::mt19937_64 rng = derive_rng(seed, "init");
  ModelParams p;
  p.encoder = init_encoder(config.encoder, rng);
  p.linker = init_linker(config.encoder.width, config.entity_width, relations, rng, link_init);
  return p;
}

}  // namespace

Model::Model(ModelConfig config, Tokenizer tokenizer, RelationSchema schema, std::uint64_t seed, LinkInit link_init)
    : config_(std::move(config)), tokenizer_(std::move(tokenizer)), schema_(std::move(schema)) {
  if (schema_.size() == 0) throw ConfigError("model needs at least one relation");
  params_ = fresh_params(config_, relations(), seed, link_init);
}

Model::Model(ModelConfig config, Tokenizer tokenizer, RelationSchema schema, ModelParams params)
    : config_(std::move(config)), tokenizer_(std::move(tokenizer)), schema_(std::move(schema)), params_(std::move(params)) {
  check_shapes();
}

void Model::check_shapes() const {
  ModelParams expected = fresh_params(config_, relations(), 0, LinkInit::kZero);
  std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> want;
  ModelParams::visit(expected, [&](const std::string& name, const Matrix& m) {
    want.push_back({name, {m.rows(), m.cols()}});
  });
  std::size_t i = 0;
  ModelParams::visit(params_, [&](const std::string& name, const Matrix& m) {
    if (i >= want.size() || want[i].first != name) throw ShapeError("unexpected tensor '" + name + "'");
    auto [r, c] = want[i].second;
    if (m.rows() != r || m.cols() != c) {
      throw ShapeError("tensor '" + name + "' is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       " but the configuration implies " + std::to_string(r) + "x" + std::to_string(c));
    }
    ++i;
  });
  if (i != want.size()) throw ShapeError("missing tensor '" + want[i].first + "'");
}

Matrix Model::encode(std::span<const int> ids, EncoderCache* cache) const {
  if (config_.encoder.kind == EncoderKind::kToy) return encode_toy(params_.encoder, config_.encoder, ids, cache);
  if (!adapter_) throw CapabilityError("pretrained encoder adapter is not available in this build");
  return adapter_->encode(ids);
}

LinkScoreTensor Model::score(const Sentence& sentence, const CandidateSet& candidates) const {
  Matrix h = encode(sentence.token_ids);
  Matrix e = entity_repr(h, candidates.spans);
  Projection proj = project(e, params_.linker);
  return spanlink::score(proj, params_.linker.link);
}

double Model::loss(const Sentence& sentence, const CandidateSet& candidates) const {
  Matrix h = encode(sentence.token_ids);
  Matrix e = entity_repr(h, candidates.spans);
  Projection proj = project(e, params_.linker);
  auto logits = link_logits(proj, params_.linker.link);
  auto labels = GoldLabelTensor::from_sentence(sentence, candidates, relations());
  return loss_from_logits(logits, labels);
}

double Model::loss_and_grad(const Sentence& sentence, const CandidateSet& candidates, double scale,
                            ModelParams& grad) const {
  EncoderCache cache;
  const bool train_encoder = trains_encoder();
  Matrix h = encode(sentence.token_ids, train_encoder ? &cache : nullptr);
  Matrix e = entity_repr(h, candidates.spans);
  Projection proj = project(e, params_.linker);
  auto logits = link_logits(proj, params_.linker.link);
  auto labels = GoldLabelTensor::from_sentence(sentence, candidates, relations());
  const double value = loss_from_logits(logits, labels);

  LinkerGrad lg{std::move(grad.linker), Matrix()};
  linker_backward(e, proj, logits, labels, params_.linker, scale, lg);
  grad.linker = std::move(lg.params);
  if (train_encoder) {
    Matrix dh = entity_repr_backward(lg.entities, candidates.spans, h.rows());
    encode_toy_backward(params_.encoder, config_.encoder, cache, dh, grad.encoder);
  }
  return value;
}

namespace {

constexpr char kMagic[8] = {'S', 'P', 'N', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

json encoder_json(const EncoderConfig& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"width", c.width},   {"vocab_size", c.vocab_size},
          {"max_length", c.max_length},            {"layers", c.layers}, {"radius", c.radius}};
}

EncoderConfig encoder_from_json(const json& j) {
  EncoderConfig c;
  c.kind = parse_encoder_kind(j.at("kind").get<std::string>());
  c.width = j.at("width").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.max_length = j.at("max_length").get<int>();
  c.layers = j.at("layers").get<int>();
  c.radius = j.at("radius").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::map<std::string, std::string>& run_config) {
  json header;
  header["format"] = "spanlink-checkpoint";
  header["version"] = kVersion;
  header["encoder"] = encoder_json(model.config().encoder);
  header["entity_width"] = model.config().entity_width;
  header["tokenizer"] = {{"word_level", model.tokenizer().word_level_mode()}, {"pieces", model.tokenizer().pieces()}};
  header["relations"] = model.schema().names();
  header["run_config"] = run_config;
  json tensors = json::array();
  std::uint64_t offset = 0;
  ModelParams::visit(model.params(), [&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(m.size());
  });
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  ModelParams::visit(model.params(), [&](const std::string&, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
  });
  if (!out) throw DatasetError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw DatasetError(path.string() + " is not a checkpoint");
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || version != kVersion) throw DatasetError("unsupported checkpoint version in " + path.string());
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  const json header = json::parse(text);

  ModelConfig config;
  config.encoder = encoder_from_json(header.at("encoder"));
  config.entity_width = header.at("entity_width").get<int>();
  const auto& tok = header.at("tokenizer");
  Tokenizer tokenizer = tok.at("word_level").get<bool>()
                            ? Tokenizer::word_level()
                            : Tokenizer::from_pieces(tok.at("pieces").get<std::vector<std::string>>());
  RelationSchema schema(header.at("relations").get<std::vector<std::string>>());

  ModelParams params = fresh_params(config, static_cast<int>(schema.size()), 0, LinkInit::kZero);
  const auto& table = header.at("tensors");
  std::size_t i = 0;
  ModelParams::visit(params, [&](const std::string& name, Matrix& m) {
    if (i >= table.size() || table[i].at("name").get<std::string>() != name) {
      throw ShapeError("checkpoint tensor table does not list '" + name + "' where expected");
    }
    const auto rows = table[i].at("rows").get<Eigen::Index>();
    const auto cols = table[i].at("cols").get<Eigen::Index>();
    if (rows != m.rows() || cols != m.cols()) {
      throw ShapeError("checkpoint tensor '" + name + "' is " + std::to_string(rows) + "x" + std::to_string(cols) +
                       " but its configuration implies " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        m(r, c) = v;
      }
    }
    ++i;
  });
  if (!in) throw DatasetError("truncated checkpoint " + path.string());
  if (i != table.size()) throw ShapeError("checkpoint lists unexpected extra tensors");

  Checkpoint ck;
  ck.model = std::make_unique<Model>(config, std::move(tokenizer), std::move(schema), std::move(params));
  ck.run_config = header.at("run_config").get<std::map<std::string, std::string>>();
  return ck;
}

}  // namespace spanlink
