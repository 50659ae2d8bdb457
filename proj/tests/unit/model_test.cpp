#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rijepa/model/model.hpp"
#include "rijepa/model/symbolic.hpp"
#include "rijepa/numcore/optim.hpp"
#include "rijepa/objectives/losses.hpp"
#include "support/loss_gradcheck.hpp"

using namespace rijepa;
using namespace rijepa::model;
namespace rm = rijepa::rulemine;

namespace {

rm::Vocabulary toy_vocabulary() {
  return rm::Vocabulary({"cp=4.0", "exang=1.0", "slope=3.0", "target_risk=0.0", "target_risk=1.0"});
}

}  // namespace

TEST(ModelSpec, PaperShapes) {
  const auto syn = ModelSpec::synthetic(true);
  EXPECT_EQ(syn.data_dim, 3u);
  EXPECT_EQ(syn.encoder_hidden, 32u);
  EXPECT_EQ(syn.latent_dim, 16u);
  EXPECT_FALSE(syn.layer_norm);
  const auto clin = ModelSpec::clinical(25, 40, true);
  EXPECT_EQ(clin.latent_dim, 32u);
  EXPECT_EQ(clin.encoder_hidden, 64u);
  EXPECT_EQ(clin.predictor_hidden, 64u);
  EXPECT_TRUE(clin.layer_norm);
  EXPECT_EQ(model_spec_from_json(to_json(clin)), clin);
  ModelSpec bad = syn;
  bad.rule_dim = 5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(EncodeRule, MultiHotAndOneHot) {
  const auto vocab = toy_vocabulary();
  const auto r = rm::RuleTuple::conjunction({{"cp", "4.0"}, {"slope", "3.0"}}, {{"target_risk", "1.0"}});
  auto [ante, cons] = encode_rule(r, vocab);
  EXPECT_EQ(ante, (Tensor{{1, 0, 1, 0, 0}}));
  EXPECT_EQ(cons, (Tensor{{0, 0, 0, 0, 1}}));

  const auto null_rule = rm::RuleTuple::conjunction({}, {{"target_risk", "0.0"}});
  EXPECT_EQ(encode_rule(null_rule, vocab).first, Tensor(1, 5));

  const auto other = rm::RuleTuple::conjunction({{"cp", "4.0"}, {"slope", "3.0"}}, {{"target_risk", "0.0"}});
  EXPECT_EQ(encode_rule(other, vocab).first, ante);
  EXPECT_EQ(encode_antecedents({r, other}, vocab).row_vector(1), ante.row_vector(0));

  const auto unknown = rm::RuleTuple::conjunction({{"cp", "2.0"}}, {{"target_risk", "0.0"}});
  EXPECT_THROW(encode_rule(unknown, vocab), rm::VocabularyError);
}

TEST(Model, ForwardShapesDeterminismAndFiniteness) {
  RngStream rng(111);
  DualEncoderModel clinical(ModelSpec::clinical(6, 5, true), rng);
  Tensor x(3, 6);
  const Tensor a = clinical.forward_data(x);
  EXPECT_EQ(a.cols(), 32u);
  EXPECT_TRUE(a.all_finite());
  EXPECT_EQ(clinical.forward_data(x), a);
  EXPECT_THROW(clinical.forward_data(Tensor(1, 5)), DimensionError);

  const Tensor null_out = clinical.forward_rule(Tensor(1, 5));
  EXPECT_TRUE(null_out.all_finite());
  EXPECT_GT(l2_norm(null_out.row_span(0)), 0.0);
  EXPECT_EQ(clinical.forward_rule(Tensor(1, 5)), null_out);
  EXPECT_THROW(clinical.forward_rule(Tensor(1, 6)), DimensionError);

  DualEncoderModel syn(ModelSpec::synthetic(false), rng);
  EXPECT_EQ(syn.forward_data(Tensor(2, 3)).cols(), 16u);
  EXPECT_THROW(syn.forward_rule(Tensor(1, 3)), std::logic_error);
}

TEST(Model, TargetStartsAsContextCopyAndPathwaysIndependentOfRules) {
  RngStream master(42);
  DualEncoderModel with(ModelSpec::clinical(4, 5, true), master);
  DualEncoderModel without(ModelSpec::clinical(4, 5, false), master);
  auto c = with.data_context_parameters();
  auto t = with.data_target_parameters();
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c[i]->value(), t[i]->value());
  EXPECT_EQ(with.data_pathway_parameter_count(), without.data_pathway_parameter_count());
  auto pw = with.trainable_parameters();
  auto pn = without.trainable_parameters();
  ASSERT_LT(pn.size(), pw.size());
  for (std::size_t i = 0; i < pn.size(); ++i) EXPECT_EQ(pw[i]->value(), pn[i]->value());
}

TEST(Model, SinglePredictorSharedAcrossModalities) {
  RngStream master(5);
  DualEncoderModel m(ModelSpec::clinical(4, 5, true), master);
  std::set<const Parameter*> seen;
  for (const Parameter* p : m.trainable_parameters()) EXPECT_TRUE(seen.insert(p).second);

  // A rule-only loss must reach the same g parameters a data-only loss reaches.
  for (Parameter* p : m.trainable_parameters()) p->zero_grad();
  {
    Tape tape;
    tape.backward(tape.sum(objectives::rule_energies(tape, m, Tensor(2, 5, 1.0), Tensor(2, 5, 0.5))));
  }
  double g_norm = 0.0;
  for (Parameter* p : m.predictor().parameters()) g_norm += l2_norm(p->grad().data());
  EXPECT_GT(g_norm, 0.0);
  for (const Parameter* p : m.data_target_parameters()) EXPECT_EQ(l2_norm(p->grad().data()), 0.0);
}

TEST(Model, EnergyZeroWhenTargetMatchesPrediction) {
  RngStream master(9);
  DualEncoderModel m(ModelSpec::clinical(3, 4, true), master);
  // Constant outputs: zero the last layer weights, give both the same bias.
  auto set_constant = [](Mlp& mlp, double v) {
    auto ps = mlp.parameters();
    ps[ps.size() - 2]->value().fill(0.0);
    ps[ps.size() - 1]->value().fill(v);
  };
  set_constant(m.predictor(), 0.25);
  set_constant(m.target_encoder(Modality::Rule), 0.25);
  const auto e = m.energy(Tensor(2, 4, 1.0), Tensor(2, 4, 0.0), EnergyPair::RuleToRule);
  EXPECT_DOUBLE_EQ(e[0], 0.0);
  EXPECT_DOUBLE_EQ(e[1], 0.0);
}

TEST(Model, EnergyMatchesLatentDistanceAndIsNonNegative) {
  RngStream master(10);
  DualEncoderModel m(ModelSpec::clinical(3, 4, true), master);
  RngStream rng(1);
  const Tensor x = oracle::random_tensor(rng, 5, 3);
  const Tensor c = oracle::random_tensor(rng, 5, 4);
  const auto e = m.energy(x, c, EnergyPair::DataToRule);
  const Tensor p = m.forward_data(x);
  const Tensor t = m.target_latent(c, Modality::Rule);
  for (std::size_t i = 0; i < 5; ++i) {
    double manual = 0.0;
    for (std::size_t k = 0; k < p.cols(); ++k) manual += (t(i, k) - p(i, k)) * (t(i, k) - p(i, k));
    EXPECT_NEAR(e[i], manual, 1e-12);
    EXPECT_GE(e[i], 0.0);
  }
}

TEST(ZeroShot, PolesAndTies) {
  RiskPoles poles{{1.0, 0.0}, {-1.0, 0.0}};
  const auto r = classify_latents(Tensor{{1.0, 0.0}, {0.0, 3.0}, {-0.9, 0.1}}, poles);
  EXPECT_EQ(r[0].label, 1);
  EXPECT_DOUBLE_EQ(r[0].distance_high, 0.0);
  EXPECT_EQ(r[1].label, 0);  // equidistant
  EXPECT_EQ(r[2].label, 0);

  RngStream master(3);
  DualEncoderModel classic(ModelSpec::clinical(3, 5, false), master);
  EXPECT_THROW(zero_shot_classify(classic, Tensor(1, 3), poles), std::logic_error);

  DualEncoderModel ri(ModelSpec::clinical(3, 5, true), master);
  const auto vocab = toy_vocabulary();
  const auto p1 = compute_poles(ri, vocab);
  const auto p2 = compute_poles(ri, vocab);
  EXPECT_EQ(p1.high, p2.high);
  EXPECT_EQ(p1.high.size(), 32u);
}

TEST(MaskContext, Examples) {
  RngStream rng(4);
  const Tensor x = oracle::random_tensor(rng, 20, 10);
  RngStream a(77);
  EXPECT_EQ(mask_context(x, 0.0, a), x);
  const Tensor m1 = mask_context(x, 0.3, a);
  RngStream b2(77);
  mask_context(x, 0.0, b2);
  EXPECT_EQ(mask_context(x, 0.3, b2), m1);

  RngStream c(8);
  const Tensor nearly = mask_context(x, 0.999, c);
  std::size_t zeros = 0;
  for (double v : nearly.data()) zeros += v == 0.0;
  EXPECT_GE(zeros, 195u);
  EXPECT_THROW(mask_context(x, 1.0, c), std::invalid_argument);
}

TEST(Model, EmaMovesOnlyTheTarget) {
  RngStream master(12);
  DualEncoderModel m(ModelSpec::clinical(3, 4, true), master);
  for (Parameter* p : m.trainable_parameters()) p->value().fill(1.0);
  for (Parameter* p : m.data_target_parameters()) p->value().fill(0.0);
  m.update_target(0.99);
  for (const Parameter* p : m.data_target_parameters())
    for (double v : p->value().data()) EXPECT_NEAR(v, 0.01, 1e-15);
  EXPECT_EQ(parameter_checksum(m), parameter_checksum(m));
}
