#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spanlink/corpus.hpp"

namespace spanlink {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

enum class EncoderKind { kToy, kPretrainedAdapter };

EncoderKind parse_encoder_kind(std::string_view s);
std::string_view to_string(EncoderKind k);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kToy;
  int width = 16;  // d
  int vocab_size = 200;
  int max_length = static_cast<int>(kMaxSequenceLength);
  int layers = 2;
  int radius = 2;  // each mixing layer sees tokens i-radius .. i+radius

  // Throws ConfigError on non-positive sizes.
  void validate() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// One context-mixing layer: H' = H + tanh(sum_o shift_o(H) * taps[o] + bias),
// where shift_o(H) row i is H row i + o - radius (zero outside the sentence).
struct MixLayer {
  std::vector<Matrix> taps;  // 2 * radius + 1 matrices, d x d
  Matrix bias;               // 1 x d
};

struct EncoderParams {
  Matrix token_embedding;     // vocab x d
  Matrix position_embedding;  // max_length x d
  std::vector<MixLayer> layers;

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f(std::string("encoder.token_embedding"), self.token_embedding);
    f(std::string("encoder.position_embedding"), self.position_embedding);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string prefix = "encoder.layer" + std::to_string(l);
      for (std::size_t o = 0; o < self.layers[l].taps.size(); ++o) {
        f(prefix + ".tap" + std::to_string(o), self.layers[l].taps[o]);
      }
      f(prefix + ".bias", self.layers[l].bias);
    }
  }
};

// Empty parameter set for the adapter kind; uniform fan-in scheme for the toy kind.
EncoderParams init_encoder(const EncoderConfig& cfg, std::mt19937_64& rng);

struct EncoderCache {
  std::vector<int> ids;
  std::vector<Matrix> inputs;       // H entering each layer
  std::vector<Matrix> activations;  // tanh output of each layer
};

// L x d token matrix. Throws RangeError for out-of-vocabulary ids or
// L outside [1, max_length]. cache, when given, records what backward needs.
Matrix encode_toy(const EncoderParams& params, const EncoderConfig& cfg, std::span<const int> ids,
                  EncoderCache* cache = nullptr);

// Accumulates parameter gradients for dL/dH into grad.
void encode_toy_backward(const EncoderParams& params, const EncoderConfig& cfg, const EncoderCache& cache,
                         const Matrix& d_output, EncoderParams& grad);

// Row i = (H[start_i] + H[end_i]) / 2. Throws RangeError for spans outside H.
Matrix entity_repr(const Matrix& tokens, std::span<const Span> spans);
// Adjoint of entity_repr: maps dL/dE back onto an L x d token gradient.
Matrix entity_repr_backward(const Matrix& d_entities, std::span<const Span> spans, Eigen::Index length);

// Bridge to an external transformer. The backend receives token ids and must
// return an L x width matrix of final hidden states. Encoding through an
// adapter without a backend raises CapabilityError. Gradients do not flow
// through the adapter, so training with it keeps the encoder frozen.
class PretrainedAdapter {
 public:
  using Backend = std::function<Matrix(std::span<const int>)>;

  explicit PretrainedAdapter(int width = 768, Backend backend = {}) : width_(width), backend_(std::move(backend)) {}

  bool available() const { return static_cast<bool>(backend_); }
  int width() const { return width_; }
  Matrix encode(std::span<const int> ids) const;

 private:
  int width_;
  Backend backend_;
};

}  // namespace spanlink
