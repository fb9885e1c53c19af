#include "spanlink/encoder.hpp"

#include <cmath>

#include "spanlink/error.hpp"

namespace spanlink {

EncoderKind parse_encoder_kind(std::string_view s) {
  if (s == "toy") return EncoderKind::kToy;
  if (s == "pretrained-adapter") return EncoderKind::kPretrainedAdapter;
  throw ConfigError("unknown encoder kind '" + std::string(s) + "' (expected toy or pretrained-adapter)");
}

std::string_view to_string(EncoderKind k) { return k == EncoderKind::kToy ? "toy" : "pretrained-adapter"; }

void EncoderConfig::validate() const {
  if (width <= 0) throw ConfigError("encoder width must be positive");
  if (max_length <= 0) throw ConfigError("encoder max_length must be positive");
  if (kind == EncoderKind::kToy) {
    if (vocab_size <= 0) throw ConfigError("toy encoder vocab_size must be positive");
    if (layers < 0 || radius < 0) throw ConfigError("toy encoder layers and radius must be non-negative");
  }
}

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double bound, std::mt19937_64& rng) {
  // Explicit affine map of raw 53-bit draws keeps initialization identical
  // across standard library implementations.
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m(r, c) = (2.0 * u - 1.0) * bound;
    }
  }
  return m;
}

}  // namespace

EncoderParams init_encoder(const EncoderConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  EncoderParams p;
  if (cfg.kind != EncoderKind::kToy) return p;
  const int d = cfg.width;
  p.token_embedding = uniform(cfg.vocab_size, d, 0.5, rng);
  p.position_embedding = uniform(cfg.max_length, d, 0.1, rng);
  const int taps = 2 * cfg.radius + 1;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d * taps));
  for (int l = 0; l < cfg.layers; ++l) {
    MixLayer layer;
    for (int o = 0; o < taps; ++o) layer.taps.push_back(uniform(d, d, bound, rng));
    layer.bias = Matrix::Zero(1, d);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Matrix encode_toy(const EncoderParams& params, const EncoderConfig& cfg, std::span<const int> ids,
                  EncoderCache* cache) {
  const auto L = static_cast<Eigen::Index>(ids.size());
  if (L < 1 || L > cfg.max_length) {
    throw RangeError("sequence length " + std::to_string(L) + " outside [1, " + std::to_string(cfg.max_length) + "]");
  }
  Matrix h(L, cfg.width);
  for (Eigen::Index i = 0; i < L; ++i) {
    const int id = ids[i];
    if (id < 0 || id >= params.token_embedding.rows()) {
      throw RangeError("token id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(params.token_embedding.rows()));
    }
    h.row(i) = params.token_embedding.row(id) + params.position_embedding.row(i);
  }
  if (cache) {
    cache->ids.assign(ids.begin(), ids.end());
    cache->inputs.clear();
    cache->activations.clear();
  }
  const int r = cfg.radius;
  for (const auto& layer : params.layers) {
    Matrix z = Matrix::Zero(L, cfg.width);
    z.rowwise() += layer.bias.row(0);
    for (int o = -r; o <= r; ++o) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, -o);
      const Eigen::Index hi = std::min<Eigen::Index>(L, L - o);
      if (hi <= lo) continue;
      z.middleRows(lo, hi - lo).noalias() += h.middleRows(lo + o, hi - lo) * layer.taps[o + r];
    }
    Matrix a = z.array().tanh().matrix();
    if (cache) {
      cache->inputs.push_back(h);
      cache->activations.push_back(a);
    }
    h += a;
  }
  return h;
}

void encode_toy_backward(const EncoderParams& params, const EncoderConfig& cfg, const EncoderCache& cache,
                         const Matrix& d_output, EncoderParams& grad) {
  const auto L = static_cast<Eigen::Index>(cache.ids.size());
  const int r = cfg.radius;
  Matrix g = d_output;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& glayer = grad.layers[l];
    const Matrix& h = cache.inputs[l];
    const Matrix& a = cache.activations[l];
    Matrix dz = (g.array() * (1.0 - a.array().square())).matrix();
    glayer.bias += dz.colwise().sum();
    Matrix dh = g;
    for (int o = -r; o <= r; ++o) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, -o);
      const Eigen::Index hi = std::min<Eigen::Index>(L, L - o);
      if (hi <= lo) continue;
      glayer.taps[o + r].noalias() += h.middleRows(lo + o, hi - lo).transpose() * dz.middleRows(lo, hi - lo);
      dh.middleRows(lo + o, hi - lo).noalias() += dz.middleRows(lo, hi - lo) * layer.taps[o + r].transpose();
    }
    g = std::move(dh);
  }
  for (Eigen::Index i = 0; i < L; ++i) {
    grad.token_embedding.row(cache.ids[i]) += g.row(i);
    grad.position_embedding.row(i) += g.row(i);
  }
}

Matrix entity_repr(const Matrix& tokens, std::span<const Span> spans) {
  Matrix out(static_cast<Eigen::Index>(spans.size()), tokens.cols());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start < 0 || s.start > s.end || s.end >= tokens.rows()) {
      throw RangeError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) + "] outside " +
                       std::to_string(tokens.rows()) + " tokens");
    }
    out.row(static_cast<Eigen::Index>(i)) = 0.5 * (tokens.row(s.start) + tokens.row(s.end));
  }
  return out;
}

Matrix entity_repr_backward(const Matrix& d_entities, std::span<const Span> spans, Eigen::Index length) {
  Matrix g = Matrix::Zero(length, d_entities.cols());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto row = d_entities.row(static_cast<Eigen::Index>(i));
    g.row(spans[i].start) += 0.5 * row;
    g.row(spans[i].end) += 0.5 * row;
  }
  return g;
}

Matrix PretrainedAdapter::encode(std::span<const int> ids) const {
  if (!backend_) {
    throw CapabilityError("pretrained encoder adapter has no backend; supply one or use the toy encoder");
  }
  Matrix h = backend_(ids);
  if (h.rows() != static_cast<Eigen::Index>(ids.size()) || h.cols() != width_) {
    throw ShapeError("adapter returned " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()) +
                     ", expected " + std::to_string(ids.size()) + "x" + std::to_string(width_));
  }
  return h;
}

}  // namespace spanlink
