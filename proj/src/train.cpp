#include "spanlink/train.hpp"

#include <cmath>
#include <numeric>

#include "spanlink/candidates.hpp"
#include "spanlink/error.hpp"

namespace spanlink {

Adam::Adam(const ModelParams& like, double lr, double beta1, double beta2, double eps)
    : m_(like.zeros_like()), v_(like.zeros_like()), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(ModelParams& params, const ModelParams& grad, bool update_encoder) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::vector<Matrix*> p, m, v;
  std::vector<const Matrix*> g;
  std::vector<bool> is_encoder;
  ModelParams::visit(params, [&](const std::string& name, Matrix& x) {
    p.push_back(&x);
    is_encoder.push_back(name.rfind("encoder.", 0) == 0);
  });
  ModelParams::visit(grad, [&](const std::string&, const Matrix& x) { g.push_back(&x); });
  ModelParams::visit(m_, [&](const std::string&, Matrix& x) { m.push_back(&x); });
  ModelParams::visit(v_, [&](const std::string&, Matrix& x) { v.push_back(&x); });
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (is_encoder[i] && !update_encoder) continue;
    *m[i] = beta1_ * *m[i] + (1.0 - beta1_) * *g[i];
    *v[i] = beta2_ * *v[i] + (1.0 - beta2_) * g[i]->cwiseProduct(*g[i]);
    p[i]->array() -= lr_ * (m[i]->array() / c1) / ((v[i]->array() / c2).sqrt() + eps_);
  }
}

std::vector<SentencePrediction> predict_all(const Model& model, std::span<const Sentence> sentences, int c_infer,
                                            double theta) {
  std::vector<SentencePrediction> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back({s.id, s.text, predict_sentence(s, model, c_infer, theta)});
  return out;
}

Prf evaluate_model(const Model& model, std::span<const Sentence> sentences, int c_infer, double theta,
                   MatchMode mode) {
  std::vector<EvalSentence> preds, golds;
  for (const auto& s : sentences) {
    auto p = predict_sentence(s, model, c_infer, theta);
    preds.push_back(to_eval(s, p, model.schema()));
    golds.push_back(to_eval(s, model.schema()));
  }
  return micro_prf(preds, golds, mode).overall;
}

TrainResult train_model(const RunConfig& config, std::span<const Sentence> train, std::span<const Sentence> valid,
                        Tokenizer tokenizer, RelationSchema schema, std::ostream* log,
                        std::shared_ptr<const PretrainedAdapter> adapter) {
  config.validate();
  ModelConfig mc;
  mc.encoder = config.encoder_config();
  mc.entity_width = config.d_e;
  if (mc.encoder.kind == EncoderKind::kToy) mc.encoder.vocab_size = static_cast<int>(tokenizer.vocab_size());

  auto model = std::make_unique<Model>(mc, std::move(tokenizer), std::move(schema), config.seed, config.link_init);
  if (adapter) model->set_adapter(adapter);

  TrainResult result;
  Adam adam(model->params(), config.lr);
  ModelParams best = model->params();
  int since_best = 0;

  std::vector<std::size_t> order(train.size());
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle = derive_rng(config.seed, "shuffle", static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle, i)]);

    for (std::size_t b0 = 0, batch_id = 0; b0 < order.size(); b0 += batch, ++batch_id) {
      const std::size_t b1 = std::min(order.size(), b0 + batch);
      const double scale = 1.0 / static_cast<double>(b1 - b0);
      ModelParams grad = model->params().zeros_like();
      double batch_loss = 0.0;
      for (std::size_t i = b0; i < b1; ++i) {
        const Sentence& s = train[order[i]];
        std::mt19937_64 rng = derive_rng(config.seed, s.id, static_cast<std::uint64_t>(epoch));
        CandidateSet cand = sample_training_set(s, config.c_train, config.n_neg, rng);
        batch_loss += scale * model->loss_and_grad(s, cand, scale, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_id));
      }
      adam.step(model->params(), grad, model->trains_encoder());
      result.final_loss = batch_loss;
      if (log) {
        *log << "{\"epoch\":" << epoch << ",\"step\":" << adam.steps() << ",\"batch\":" << batch_id
             << ",\"loss\":" << batch_loss << "}\n";
      }
    }

    if (!valid.empty() && epoch % config.eval_every == 0) {
      const double f1 = evaluate_model(*model, valid, config.c_valid, config.theta, config.match_mode).f1;
      if (log) *log << "{\"epoch\":" << epoch << ",\"valid_f1\":" << f1 << "}\n";
      if (f1 > result.best_valid_f1) {
        result.best_valid_f1 = f1;
        result.best_epoch = epoch;
        best = model->params();
        since_best = 0;
      } else if (config.patience > 0 && ++since_best >= config.patience) {
        break;
      }
    }
  }
  result.steps = adam.steps();
  if (valid.empty()) {
    result.best_epoch = config.epochs;
  } else if (result.best_valid_f1 >= 0.0) {
    model->params() = std::move(best);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace spanlink
