#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rijepa/experiments/bundle.hpp"
#include "rijepa/experiments/clinical.hpp"
#include "rijepa/experiments/io.hpp"
#include "rijepa/experiments/pca.hpp"
#include "rijepa/experiments/probe.hpp"
#include "rijepa/experiments/synthetic.hpp"
#include "rijepa/numcore/errors.hpp"

using namespace rijepa;
using namespace rijepa::experiments;

namespace {

const std::filesystem::path kData = std::filesystem::path(RIJEPA_DATA_DIR) / "processed.cleveland.data";

const ClevelandData& cleveland() {
  static const ClevelandData d = load_cleveland(kData);
  return d;
}

Tensor gaussian(RngStream& rng, std::size_t n, std::size_t d, double sd = 1.0) {
  Tensor t(n, d);
  for (double& v : t.data()) v = sd * rng.normal();
  return t;
}

SyntheticConfig small_synthetic() {
  SyntheticConfig c;
  c.n_data = 60;
  c.n_rules = 20;
  c.n_negatives = 30;
  c.n_test = 20;
  c.epochs = 25;
  c.grid_resolution = 7;
  c.train_pairwise = false;
  return c;
}

ClinicalConfig small_clinical() {
  ClinicalConfig c;
  c.epochs = 3;
  c.discovery_chains = 2;
  c.langevin_iterations = 10;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rijepa_experiments_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

// --- PCA ---

TEST(Pca, JacobiKnownEigenpairs) {
  const auto e = jacobi_eigen(Tensor{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.values[0], 3.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), std::sqrt(0.5), 1e-12);
}

TEST(Pca, JacobiReconstructsRandomSymmetric) {
  RngStream rng(7);
  const std::size_t n = 9;
  Tensor a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
  const auto e = jacobi_eigen(a);
  for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_GE(e.values[i], e.values[i + 1]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      EXPECT_NEAR(s, a(i, j), 1e-10);
    }
}

TEST(Pca, LineCapturesAllVariance) {
  Tensor x(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    const double t = 0.1 * static_cast<double>(i) - 2.0;
    x(i, 0) = 1.0 + t;
    x(i, 1) = -2.0 + 2.0 * t;
    x(i, 2) = 0.5 + 3.0 * t;
  }
  const auto p = pca_fit_project(x, 1);
  EXPECT_NEAR(p.explained_ratio[0], 1.0, 1e-12);
}

TEST(Pca, IsotropicVariancesAgree) {
  RngStream rng(11);
  const auto p = pca_fit_project(gaussian(rng, 20000, 2), 2);
  EXPECT_LT(std::abs(p.eigenvalues[0] - p.eigenvalues[1]) / p.eigenvalues[0], 0.05);
}

TEST(Pca, MeanProjectsToOrigin) {
  RngStream rng(3);
  const Tensor x = gaussian(rng, 40, 5);
  const auto p = pca_fit_project(x, 3);
  const auto origin = pca_project(p, Tensor::row(p.mean));
  for (double v : origin.data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Pca, SignConventionLargestEntryPositive) {
  RngStream rng(5);
  const auto p = pca_fit_project(gaussian(rng, 100, 6), 4);
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < 6; ++j)
      if (std::abs(p.components(k, j)) > std::abs(p.components(k, arg))) arg = j;
    EXPECT_GT(p.components(k, arg), 0.0);
  }
}

TEST(Pca, PlantedRankTwoIn16D) {
  RngStream rng(13);
  const Tensor basis = gaussian(rng, 2, 16);
  const Tensor coeff = gaussian(rng, 500, 2, 3.0);
  Tensor x(500, 16);
  for (std::size_t i = 0; i < 500; ++i)
    for (std::size_t j = 0; j < 16; ++j)
      x(i, j) = coeff(i, 0) * basis(0, j) + coeff(i, 1) * basis(1, j) + 0.01 * rng.normal();
  const auto p = pca_fit_project(x, 2);
  EXPECT_GE(p.explained_ratio[0] + p.explained_ratio[1], 0.99);
}

TEST(Pca, ZeroVarianceIsDegenerate) {
  EXPECT_THROW(pca_fit_project(Tensor(10, 4, 2.5), 2), DegenerateInputError);
  EXPECT_THROW(pca_fit_project(Tensor(1, 4), 1), std::invalid_argument);
  EXPECT_THROW(pca_fit_project(Tensor{{1, 2}, {3, 4}}, 3), std::invalid_argument);
}

// --- linear probe ---

TEST(Probe, SeparableBlobs) {
  RngStream rng(17);
  auto blobs = [&](std::size_t n) {
    Tensor x = gaussian(rng, n, 2, 0.3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i % 2);
      x(i, 0) += y[i] ? 3.0 : -3.0;
    }
    return std::pair{x, y};
  };
  const auto [xa, ya] = blobs(200);
  const auto [xb, yb] = blobs(100);
  const auto r = linear_probe(xa, ya, xb, yb);
  EXPECT_DOUBLE_EQ(r.train_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.test_accuracy, 1.0);
}

TEST(Probe, IndependentLabelsNearChance) {
  RngStream rng(19);
  const Tensor xa = gaussian(rng, 2000, 4), xb = gaussian(rng, 2000, 4);
  std::vector<int> ya(2000), yb(2000);
  for (auto& v : ya) v = rng.bernoulli(0.5);
  for (auto& v : yb) v = rng.bernoulli(0.5);
  EXPECT_NEAR(linear_probe(xa, ya, xb, yb).test_accuracy, 0.5, 0.1);
}

TEST(Probe, SingleClassIsDegenerate) {
  const Tensor x{{0.0}, {1.0}, {2.0}};
  EXPECT_THROW(linear_probe(x, {1, 1, 1}, x, {0, 1, 0}), DegenerateProbeError);
}

// --- Cleveland data ---

TEST(Cleveland, CompleteRowsRetained) {
  EXPECT_EQ(cleveland().raw_rows, 303u);
  EXPECT_EQ(cleveland().records.size(), 297u);
  EXPECT_EQ(cleveland().dropped_missing, 6u);
}

TEST(Cleveland, TargetIsBinarizedNum) {
  for (const auto& r : cleveland().records) EXPECT_EQ(r.target, r.num > 0 ? 1 : 0);
  const auto d = parse_cleveland("63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n"
                                 "67.0,1.0,4.0,160.0,286.0,0.0,2.0,108.0,1.0,1.5,2.0,3.0,3.0,2\n");
  ASSERT_EQ(d.records.size(), 2u);
  EXPECT_EQ(d.records[0].target, 0);
  EXPECT_EQ(d.records[1].target, 1);
}

TEST(Cleveland, MalformedRowsNameTheLine) {
  try {
    parse_cleveland("63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n1,2,3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_cleveland("63.0,1.0,5.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n"), ParseError);
  EXPECT_THROW(parse_cleveland("63.0,1.0,1.0,abc,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n"), ParseError);
  EXPECT_THROW(load_cleveland("/nonexistent/cleveland.data"), IoError);
}

TEST(Cleveland, StratifiedSplitKeepsClassRatios) {
  const auto y = labels(cleveland().records);
  for (std::uint64_t seed : {111u, 112u, 113u}) {
    const auto s = stratified_split(y, 0.8, RngStream(seed));
    EXPECT_EQ(s.train.size() + s.test.size(), y.size());
    auto rate = [&](const std::vector<std::size_t>& idx) {
      double pos = 0;
      for (std::size_t i : idx) pos += y[i];
      return pos / static_cast<double>(idx.size());
    };
    EXPECT_LT(std::abs(rate(s.train) - rate(s.test)), 0.02);
  }
}

TEST(Cleveland, EncoderStandardizesTrainingFeatures) {
  const auto& recs = cleveland().records;
  const auto enc = FeatureEncoder::fit(recs);
  const Tensor x = enc.encode(recs);
  ASSERT_EQ(x.cols(), 25u);
  ASSERT_EQ(FeatureEncoder::feature_names().size(), 25u);
  for (std::size_t c = 0; c < 5; ++c) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, c);
    const double m = s / static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, c) - m) * (x(i, c) - m);
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(ss / static_cast<double>(x.rows() - 1)), 1.0, 1e-12);
  }
  // Binary columns untouched, each one-hot group sums to one.
  for (std::size_t i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(x(i, 5), recs[i].sex);
    double groups = 0.0;
    for (std::size_t c = 8; c < 25; ++c) groups += x(i, c);
    EXPECT_DOUBLE_EQ(groups, 5.0);
  }
  const auto back = FeatureEncoder::from_json(enc.to_json());
  EXPECT_EQ(back.mean, enc.mean);
  EXPECT_EQ(back.sd, enc.sd);
}

// --- synthetic study ---

TEST(Synthetic, ConfigDefaultsRoundTrip) {
  const SyntheticConfig d;
  EXPECT_EQ(d.n_data, 1000u);
  EXPECT_EQ(d.n_rules, 200u);
  EXPECT_EQ(d.n_negatives, 500u);
  EXPECT_EQ(d.n_test, 300u);
  EXPECT_EQ(d.epochs, 500u);
  EXPECT_DOUBLE_EQ(d.margin, 5.0);
  EXPECT_EQ(d.seed, 111u);
  const auto j = to_json(d);
  EXPECT_EQ(to_json(synthetic_config_from_json(j)), j);
  EXPECT_EQ(to_json(synthetic_config_from_json(nlohmann::json::object())), j);
  EXPECT_THROW(synthetic_config_from_json({{"epoch", 3}}), ConfigError);
  EXPECT_THROW(synthetic_config_from_json({{"margin", -1.0}}), ConfigError);
  EXPECT_THROW(synthetic_config_from_json({{"margin", "five"}}), ConfigError);
}

TEST(Synthetic, DataFollowsTheGenerator) {
  const auto cfg = small_synthetic();
  const auto d = make_synthetic_data(cfg, RngStream(cfg.seed));
  EXPECT_EQ(d.x.rows(), cfg.n_data);
  EXPECT_EQ(d.neg_a.rows(), cfg.n_negatives);
  for (const auto* pair : {&d.rule_a, &d.id_a, &d.ood_a}) {
    const Tensor& c = pair == &d.rule_a ? d.rule_c : pair == &d.id_a ? d.id_c : d.ood_c;
    for (std::size_t i = 0; i < pair->rows(); ++i)
      for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(c(i, k), (*pair)(i, k) + 1.0);
  }
  // Negatives never apply the true offset.
  for (std::size_t i = 0; i < d.neg_a.rows(); ++i) {
    double r = 0.0;
    for (std::size_t k = 0; k < 3; ++k) r += std::pow(d.neg_c(i, k) - d.neg_a(i, k) - 1.0, 2);
    EXPECT_GE(std::sqrt(r), 1.0);
  }
  // Same seed, same data.
  EXPECT_EQ(make_synthetic_data(cfg, RngStream(cfg.seed)).x, d.x);
}

TEST(Synthetic, ZeroBetaReducesToClassicBitwise) {
  auto cfg = small_synthetic();
  cfg.beta = 0.0;
  const RngStream master(cfg.seed);
  const auto d = make_synthetic_data(cfg, master);
  const auto classic = train_synthetic(SyntheticVariant::Classic, d, cfg, master);
  const auto ri = train_synthetic(SyntheticVariant::RiJepa, d, cfg, master);
  EXPECT_TRUE(same_data_pathway(classic.model, ri.model));
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    EXPECT_EQ(classic.history[e].jepa, ri.history[e].jepa);
    EXPECT_EQ(classic.history[e].total, ri.history[e].total);
  }
  // With β > 0 the trajectories part.
  cfg.beta = 1.0;
  EXPECT_FALSE(same_data_pathway(classic.model, train_synthetic(SyntheticVariant::RiJepa, d, cfg, master).model));
}

TEST(Synthetic, DivergenceNamesTheEpoch) {
  auto cfg = small_synthetic();
  cfg.learning_rate = 1e300;
  const RngStream master(cfg.seed);
  const auto d = make_synthetic_data(cfg, master);
  try {
    train_synthetic(SyntheticVariant::RiJepa, d, cfg, master);
    FAIL() << "expected divergence";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Synthetic, RasterGridIsNonNegativeAndSquare) {
  const auto cfg = small_synthetic();
  const model::DualEncoderModel m(model::ModelSpec::synthetic(true), RngStream(1));
  const auto g = rasterize_energy(m, {-5.0, 5.0, 7}, cfg.rule_offset);
  ASSERT_EQ(g.rows(), 49u);
  EXPECT_DOUBLE_EQ(g(0, 0), -5.0);
  EXPECT_DOUBLE_EQ(g(48, 1), 5.0);
  for (std::size_t i = 0; i < g.rows(); ++i) EXPECT_GE(g(i, 2), 0.0);
  const auto s = summarize_grid(g);
  EXPECT_LE(s.min, s.max);
}

TEST(Synthetic, ReportArtifactsAndDeterminism) {
  const auto cfg = small_synthetic();
  const auto a = run_synthetic(cfg);
  const auto b = run_synthetic(cfg);
  EXPECT_EQ(synthetic_metrics(a).dump(), synthetic_metrics(b).dump());
  ASSERT_EQ(a.models.size(), 2u);
  EXPECT_EQ(a.pca.projected.rows(), 2 * 2 * cfg.n_test);
  const auto dir = scratch_dir("synthetic");
  write_synthetic_report(a, dir);
  for (const char* f : {"energy_table.csv", "landscape_classic_jepa.csv", "landscape_rijepa.csv",
                        "pca_projection.csv", "metrics.json", "manifest.json", "model_rijepa.ckpt"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto bundle = read_bundle(dir / "model_rijepa.ckpt");
  EXPECT_EQ(model::parameter_checksum(bundle.model), model::parameter_checksum(a.trained.back().model));
  EXPECT_EQ(bundle.context.at("experiment"), "synthetic");
  std::filesystem::remove_all(dir);
}

// --- clinical study ---

TEST(Clinical, ConfigDefaultsAndValidation) {
  const ClinicalConfig d;
  EXPECT_EQ(d.epochs, 100u);
  EXPECT_EQ(d.batch_size, 32u);
  EXPECT_DOUBLE_EQ(d.alpha, 2.0);
  EXPECT_DOUBLE_EQ(d.beta, 5.0);
  EXPECT_DOUBLE_EQ(d.margin, 2.0);
  EXPECT_DOUBLE_EQ(d.ema_tau, 0.99);
  EXPECT_DOUBLE_EQ(d.clip_norm, 1.0);
  EXPECT_DOUBLE_EQ(d.min_support, 0.04);
  EXPECT_DOUBLE_EQ(d.min_confidence, 0.70);
  const auto j = to_json(d);
  EXPECT_EQ(to_json(clinical_config_from_json(j)), j);
  EXPECT_THROW(clinical_config_from_json({{"min_support", 1.01}}), ConfigError);
  EXPECT_THROW(clinical_config_from_json({{"p_mask", 1.0}}), ConfigError);
  EXPECT_THROW(clinical_config_from_json({{"bogus", 1}}), ConfigError);
}

TEST(Clinical, PreparationMinesOnTrainingRows) {
  const auto d = prepare_clinical(cleveland(), small_clinical());
  EXPECT_EQ(d.train.size() + d.test.size(), 297u);
  EXPECT_EQ(d.train_transactions.size(), d.train.size());
  EXPECT_EQ(d.x_train.cols(), 25u);
  EXPECT_FALSE(d.rules.empty());
  for (const auto& r : d.rules) {
    ASSERT_EQ(r.consequent.size(), 1u);
    EXPECT_EQ(r.consequent[0].feature, rulemine::kRiskFeature);
    EXPECT_GE(r.stats.confidence, 0.70);
    EXPECT_GE(r.stats.support, 0.04 - 1e-12);
    EXPECT_LE(r.antecedent_size(), 4u);
  }
}

TEST(Clinical, ZeroWeightsReduceToClassicBitwise) {
  auto cfg = small_clinical();
  cfg.alpha = 0.0;
  cfg.beta = 0.0;
  const auto d = prepare_clinical(cleveland(), cfg);
  const RngStream master(cfg.seed);
  const auto classic = train_clinical(false, d, cfg, master);
  const auto ri = train_clinical(true, d, cfg, master);
  EXPECT_EQ(classic.model.data_pathway_parameter_count(), ri.model.data_pathway_parameter_count());
  EXPECT_TRUE(same_data_pathway(classic.model, ri.model));
  for (std::size_t e = 0; e < cfg.epochs; ++e) EXPECT_EQ(classic.history[e].jepa, ri.history[e].jepa);

  cfg.alpha = 2.0;
  cfg.beta = 5.0;
  EXPECT_FALSE(same_data_pathway(classic.model, train_clinical(true, d, cfg, master).model));
}

TEST(Clinical, ClassicHasNoZeroShot) {
  const auto cfg = small_clinical();
  const auto d = prepare_clinical(cleveland(), cfg);
  const auto classic = train_clinical(false, d, cfg, RngStream(cfg.seed));
  EXPECT_THROW(zero_shot_accuracy(classic.model, d.vocabulary, d.x_test, d.y_test), std::logic_error);
  const auto e = evaluate_clinical(classic, d, cfg.probe);
  EXPECT_FALSE(e.zero_shot.has_value());
  EXPECT_FALSE(e.fallback_norm.has_value());
}

TEST(Clinical, MarkerOverlapCountsAlternativesOnce) {
  const ReferenceProfile ref{"x", {{"a=1"}, {"b=Low", "b=Medium"}, {"c=3"}}};
  EXPECT_EQ(marker_overlap(ref, {"b=Low", "b=Medium", "z=0"}), (std::vector<std::string>{"b=Low"}));
  EXPECT_EQ(marker_overlap(ref, {"a=1", "c=3"}).size(), 2u);
  EXPECT_TRUE(marker_overlap(ref, {}).empty());
}

TEST(Clinical, ReportArtifacts) {
  const auto cfg = small_clinical();
  const auto r = run_clinical(cfg, cleveland());
  const auto m = clinical_metrics(r);
  for (const char* k : {"probe", "zero_shot", "fallback_norm"}) EXPECT_TRUE(m.contains(k)) << k;
  EXPECT_TRUE(m["zero_shot"]["classic_jepa"].is_null());
  EXPECT_TRUE(m["zero_shot"]["rijepa"].is_number());
  EXPECT_EQ(r.discovery.size(), 4u);
  for (const auto& run : r.discovery) EXPECT_EQ(run.steps.size(), cfg.discovery_chains);

  const auto dir = scratch_dir("clinical");
  write_clinical_report(r, dir, true);
  for (const char* f : {"metrics.json", "loss_curves.csv", "rules.txt", "rules.json", "discovery_joint.json",
                        "discovery_forward.json", "discovery_abductive.json", "discovery_marginal.json",
                        "discovery_marginal_energy.csv", "embeddings_classic_jepa.csv", "embeddings_rijepa.csv",
                        "model_rijepa.ckpt", "model_classic_jepa.ckpt", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto bundle = read_bundle(dir / "model_rijepa.ckpt");
  EXPECT_EQ(model::parameter_checksum(bundle.model), model::parameter_checksum(r.find(kRiJepaName)->model));
  EXPECT_EQ(tensor_from_json(bundle.context.at("training_inputs")), r.data.x_train);
  std::filesystem::remove_all(dir);
}

TEST(Clinical, SkippingRulesTrainsClassicOnly) {
  auto cfg = small_clinical();
  cfg.train_rules = false;
  const auto r = run_clinical(cfg, cleveland());
  ASSERT_EQ(r.trained.size(), 1u);
  EXPECT_EQ(r.trained[0].name, kClassicName);
  EXPECT_TRUE(r.discovery.empty());
}
