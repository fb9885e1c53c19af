#include <doctest.h>

#include <cmath>

#include "spanlink/candidates.hpp"
#include "spanlink/error.hpp"
#include "spanlink/linker.hpp"

using namespace spanlink;

namespace {

double scalar_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-row scalar-loop affine map.
Matrix naive_affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix out(x.rows(), w.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      double s = b(0, c);
      for (Eigen::Index k = 0; k < x.cols(); ++k) s += x(i, k) * w(k, c);
      out(i, c) = s;
    }
  }
  return out;
}

LinkerParams random_linker(int d, int de, int K, std::uint64_t seed) {
  auto rng = derive_rng(seed, "linker");
  auto p = init_linker(d, de, K, rng);
  p.head_bias.setRandom();
  p.tail_bias.setRandom();
  return p;
}

}  // namespace

TEST_CASE("projection matches the per-row oracle") {
  auto p = random_linker(5, 3, 2, 1);
  Matrix e = Matrix::Random(4, 5);
  auto proj = project(e, p);
  CHECK((proj.head - naive_affine(e, p.head_weight, p.head_bias)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((proj.tail - naive_affine(e, p.tail_weight, p.tail_bias)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(project(Matrix::Random(4, 6), p), ShapeError);
}

TEST_CASE("score matches a triple-loop oracle on a 3x2x3 instance") {
  auto p = random_linker(4, 3, 2, 2);
  Matrix e = Matrix::Random(3, 4);
  auto proj = project(e, p);
  auto probs = score(proj, p.link);
  REQUIRE(probs.entities() == 3);
  REQUIRE(probs.relations() == 2);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 3; ++j) {
        double z = 0;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) z += proj.head(i, a) * p.link[k](a, b) * proj.tail(j, b);
        }
        CHECK(std::abs(probs.at(i, k, j) - scalar_sigmoid(z)) < 1e-6);
      }
    }
  }
}

TEST_CASE("sigmoid of a large logit") {
  std::vector<Matrix> z{Matrix::Constant(1, 1, 6.0)};
  CHECK(sigmoid(z).at(0, 0, 0) == doctest::Approx(0.99753).epsilon(1e-5));
  std::vector<Matrix> extreme{Matrix::Constant(1, 2, 0.0)};
  extreme[0](0, 0) = -800.0;
  extreme[0](0, 1) = 800.0;
  auto s = sigmoid(extreme);
  CHECK(s.at(0, 0, 0) >= 0.0);
  CHECK(s.at(0, 0, 1) == 1.0);
  std::vector<Matrix> bad{Matrix::Constant(1, 1, std::nan(""))};
  CHECK_THROWS_AS(sigmoid(bad), NumericError);
}

TEST_CASE("loss of uniform one-half probabilities is ln 2") {
  GoldLabelTensor y(3, 2);
  y.set(0, 1, 2, true);
  LinkScoreTensor p(std::vector<Matrix>(2, Matrix::Constant(3, 3, 0.5)));
  CHECK(loss(p, y) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  std::vector<Matrix> zero(2, Matrix::Zero(3, 3));
  CHECK(loss_from_logits(zero, y) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss matches an eight-term hand sum on a 2x2x2 instance") {
  LinkScoreTensor p(std::vector<Matrix>{Matrix{{0.9, 0.2}, {0.3, 0.6}}, Matrix{{0.1, 0.7}, {0.8, 0.4}}});
  GoldLabelTensor y(2, 2);
  y.set(0, 0, 0, true);
  y.set(1, 1, 0, true);
  const double hand = -(std::log(0.9) + std::log(1 - 0.2) + std::log(1 - 0.3) + std::log(1 - 0.6) +
                        std::log(1 - 0.1) + std::log(1 - 0.7) + std::log(0.8) + std::log(1 - 0.4)) /
                      8.0;
  CHECK(std::abs(loss(p, y) - hand) < 1e-9);
}

TEST_CASE("mismatched label shape is a shape error") {
  LinkScoreTensor p(std::vector<Matrix>(2, Matrix::Constant(3, 3, 0.5)));
  CHECK_THROWS_AS(loss(p, GoldLabelTensor(2, 2)), ShapeError);
  CHECK_THROWS_AS(loss(p, GoldLabelTensor(3, 1)), ShapeError);
}

TEST_CASE("logit and probability forms of the loss agree") {
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_linker(4, 4, 3, 100 + trial);
    Matrix e = Matrix::Random(5, 4);
    auto proj = project(e, p);
    auto logits = link_logits(proj, p.link);
    GoldLabelTensor y(5, 3);
    y.set(trial % 5, trial % 3, (trial * 7) % 5, true);
    CHECK(std::abs(loss(sigmoid(logits), y) - loss_from_logits(logits, y)) < 1e-12);
  }
}

TEST_CASE("gold labels come from candidate indices") {
  Sentence s;
  s.tokens = {"a", "b", "c", "d"};
  s.gold_triples = {{{0, 0}, 1, {2, 3}}, {{0, 3}, 0, {1, 1}}};
  CandidateSet cand;
  cand.spans = enumerate_spans(4, 2);
  auto y = GoldLabelTensor::from_sentence(s, cand, 2);
  CHECK(y.at(cand.index_of({0, 0}), 1, cand.index_of({2, 3})) == 1.0);
  double total = 0;
  for (int k = 0; k < 2; ++k) total += y.slice(k).sum();
  CHECK(total == 1.0);  // the length-4 head has no candidate
}

TEST_CASE("zero link init gives exactly one-half everywhere") {
  auto rng = derive_rng(3, "z");
  auto p = init_linker(4, 3, 2, rng, LinkInit::kZero);
  auto probs = score(project(Matrix::Random(4, 4), p), p.link);
  for (int k = 0; k < 2; ++k) CHECK((probs.slice(k).array() == 0.5).all());
}

namespace {

double linker_objective(const Matrix& e, const LinkerParams& p, const GoldLabelTensor& y) {
  return loss_from_logits(link_logits(project(e, p), p.link), y);
}

double max_relative_error(Matrix& e, LinkerParams& p, const GoldLabelTensor& y) {
  auto proj = project(e, p);
  auto logits = link_logits(proj, p.link);
  LinkerGrad g{p, {}};
  LinkerParams::visit(g.params, [](const std::string&, Matrix& m) { m.setZero(); });
  linker_backward(e, proj, logits, y, p, 1.0, g);

  std::vector<std::pair<Matrix*, const Matrix*>> pairs;
  std::vector<Matrix*> ps;
  std::vector<const Matrix*> gs;
  LinkerParams::visit(p, [&](const std::string&, Matrix& m) { ps.push_back(&m); });
  LinkerParams::visit(g.params, [&](const std::string&, Matrix& m) { gs.push_back(&m); });
  for (std::size_t i = 0; i < ps.size(); ++i) pairs.emplace_back(ps[i], gs[i]);
  pairs.emplace_back(&e, &g.entities);

  const double h = 1e-5;
  double worst = 0;
  for (auto [x, gx] : pairs) {
    for (Eigen::Index i = 0; i < x->size(); ++i) {
      double& v = x->data()[i];
      const double saved = v;
      v = saved + h;
      const double up = linker_objective(e, p, y);
      v = saved - h;
      const double down = linker_objective(e, p, y);
      v = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = gx->data()[i];
      worst = std::max(worst, std::abs(numeric - analytic) / std::max({1e-7, std::abs(numeric), std::abs(analytic)}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("link matrix gradient at zero labels and one-half probabilities") {
  auto rng = derive_rng(8, "g");
  auto p = init_linker(4, 3, 2, rng, LinkInit::kZero);
  Matrix e = Matrix::Random(4, 4);
  GoldLabelTensor y(4, 2);
  // With every probability 1/2 and no positives, dL/dU_k = (1/2N) H^T 1 1^T T.
  auto proj = project(e, p);
  auto logits = link_logits(proj, p.link);
  LinkerGrad g{p, {}};
  LinkerParams::visit(g.params, [](const std::string&, Matrix& m) { m.setZero(); });
  linker_backward(e, proj, logits, y, p, 1.0, g);
  Matrix expected = proj.head.colwise().sum().transpose() * proj.tail.colwise().sum() * (0.5 / (4 * 2 * 4));
  CHECK((g.params.link[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_relative_error(e, p, y) < 1e-4);
}

TEST_CASE("every linker gradient matches finite differences") {
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_linker(5, 4, 3, 50 + trial);
    Matrix e = Matrix::Random(5, 5);
    GoldLabelTensor y(5, 3);
    y.set(0, 0, 1, true);
    y.set(2, 2, 2, true);
    y.set(4, 1, 0, true);
    CHECK(max_relative_error(e, p, y) < 1e-4);
  }
}
