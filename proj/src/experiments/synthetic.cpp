#include "rijepa/experiments/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rijepa/experiments/bundle.hpp"
#include "rijepa/experiments/io.hpp"
#include "rijepa/numcore/errors.hpp"
#include "rijepa/numcore/format.hpp"
#include "rijepa/numcore/optim.hpp"
#include "rijepa/objectives/negatives.hpp"

namespace rijepa::experiments {
namespace {

using model::DualEncoderModel;
using model::Modality;
using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("synthetic config: " + what);
}

// Rows 0..ceil(n/2)-1 around `first`, the rest around `second`.
Tensor gaussian_pair(RngStream& rng, std::size_t n, const Vec3& first, const Vec3& second, double variance) {
  const double sd = std::sqrt(variance);
  const std::size_t half = (n + 1) / 2;
  Tensor out(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& c = i < half ? first : second;
    for (std::size_t d = 0; d < 3; ++d) out(i, d) = c[d] + sd * rng.normal();
  }
  return out;
}

Tensor shifted(const Tensor& a, const Vec3& offset) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t d = 0; d < 3; ++d) out(i, d) += offset[d];
  return out;
}

objectives::LossComponents components(const Tape& tape, Var jepa, const Var* rule, Var total) {
  objectives::LossComponents c;
  c.jepa = tape.scalar(jepa);
  if (rule) c.ebc = tape.scalar(*rule);
  c.total = tape.scalar(total);
  return c;
}

}  // namespace

void SyntheticConfig::validate() const {
  require(n_data > 0 && n_rules > 0 && n_negatives > 0 && n_test > 0, "sample counts must be positive");
  require(rule_variance > 0.0 && std::isfinite(rule_variance), "rule_variance must be positive");
  require(data_scale > 0.0 && std::isfinite(data_scale), "data_scale must be positive");
  require(noise_sd >= 0.0 && std::isfinite(noise_sd), "noise_sd must be non-negative");
  require(epochs > 0, "epochs must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(margin > 0.0 && std::isfinite(margin), "margin must be positive");
  require(invalid_weight >= 0.0 && std::isfinite(invalid_weight), "invalid_weight must be non-negative");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be non-negative");
  require(ema_tau >= 0.0 && ema_tau <= 1.0, "ema_tau must lie in [0, 1]");
  require(grid_resolution >= 2, "grid_resolution must be at least 2");
  require(grid_lo < grid_hi, "grid_lo must be below grid_hi");
}

json to_json(const SyntheticConfig& c) {
  return {{"n_data", c.n_data},
          {"n_rules", c.n_rules},
          {"n_negatives", c.n_negatives},
          {"n_test", c.n_test},
          {"mu1", c.mu1},
          {"mu2", c.mu2},
          {"mu_neg1", c.mu_neg1},
          {"mu_neg2", c.mu_neg2},
          {"rule_variance", c.rule_variance},
          {"data_scale", c.data_scale},
          {"rule_offset", c.rule_offset},
          {"noise_sd", c.noise_sd},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"margin", c.margin},
          {"invalid_weight", c.invalid_weight},
          {"beta", c.beta},
          {"ema_tau", c.ema_tau},
          {"seed", c.seed},
          {"train_pairwise", c.train_pairwise},
          {"grid_resolution", c.grid_resolution},
          {"grid_lo", c.grid_lo},
          {"grid_hi", c.grid_hi}};
}

SyntheticConfig synthetic_config_from_json(const json& j) {
  SyntheticConfig c;
  ConfigReader r(j, "synthetic");
  r.read("n_data", c.n_data);
  r.read("n_rules", c.n_rules);
  r.read("n_negatives", c.n_negatives);
  r.read("n_test", c.n_test);
  r.read("mu1", c.mu1);
  r.read("mu2", c.mu2);
  r.read("mu_neg1", c.mu_neg1);
  r.read("mu_neg2", c.mu_neg2);
  r.read("rule_variance", c.rule_variance);
  r.read("data_scale", c.data_scale);
  r.read("rule_offset", c.rule_offset);
  r.read("noise_sd", c.noise_sd);
  r.read("epochs", c.epochs);
  r.read("learning_rate", c.learning_rate);
  r.read("margin", c.margin);
  r.read("invalid_weight", c.invalid_weight);
  r.read("beta", c.beta);
  r.read("ema_tau", c.ema_tau);
  r.read("seed", c.seed);
  r.read("train_pairwise", c.train_pairwise);
  r.read("grid_resolution", c.grid_resolution);
  r.read("grid_lo", c.grid_lo);
  r.read("grid_hi", c.grid_hi);
  r.finish();
  c.validate();
  return c;
}

SyntheticData make_synthetic_data(const SyntheticConfig& cfg, const RngStream& master) {
  cfg.validate();
  SyntheticData d;

  RngStream data = master.substream("data");
  d.x = gaussian_pair(data, cfg.n_data, cfg.mu1, cfg.mu2, cfg.data_scale * cfg.rule_variance);
  RngStream noise = master.substream("noise");
  d.y = shifted(d.x, cfg.rule_offset);
  for (double& v : d.y.data()) v += cfg.noise_sd * noise.normal();

  RngStream rules = master.substream("rules");
  d.rule_a = gaussian_pair(rules, cfg.n_rules, cfg.mu1, cfg.mu2, cfg.rule_variance);
  d.rule_c = shifted(d.rule_a, cfg.rule_offset);

  RngStream negatives = master.substream("negatives");
  objectives::SyntheticNegativeOptions neg;
  neg.center_a = cfg.mu_neg1;
  neg.center_b = cfg.mu_neg2;
  neg.antecedent_variance = cfg.rule_variance;
  neg.true_offset = cfg.rule_offset;
  auto batch = objectives::make_negatives_synthetic(negatives, cfg.n_negatives, neg);
  d.neg_a = std::move(batch.antecedents);
  d.neg_c = std::move(batch.consequents);

  RngStream test = master.substream("test");
  RngStream id = test.substream("id");
  d.id_a = gaussian_pair(id, cfg.n_test, cfg.mu1, cfg.mu2, cfg.rule_variance);
  d.id_c = shifted(d.id_a, cfg.rule_offset);
  RngStream ood = test.substream("ood");
  d.ood_a = gaussian_pair(ood, cfg.n_test, cfg.mu_neg1, cfg.mu_neg2, cfg.rule_variance);
  d.ood_c = shifted(d.ood_a, cfg.rule_offset);
  return d;
}

std::string to_string(SyntheticVariant v) {
  switch (v) {
    case SyntheticVariant::Classic: return "classic_jepa";
    case SyntheticVariant::Pairwise: return "rbjepa_pps";
    case SyntheticVariant::RiJepa: return "rijepa";
  }
  return "?";
}

TrainedModel train_synthetic(SyntheticVariant variant, const SyntheticData& data, const SyntheticConfig& cfg,
                             const RngStream& master) {
  cfg.validate();
  const bool rules = variant != SyntheticVariant::Classic;
  TrainedModel out{to_string(variant), DualEncoderModel(model::ModelSpec::synthetic(rules), master.substream("model")),
                   {}};
  DualEncoderModel& m = out.model;
  AdamWOptions adam;
  adam.learning_rate = cfg.learning_rate;
  AdamW opt(m.trainable_parameters(), adam);
  const objectives::EbcOptions ebc{cfg.margin, cfg.invalid_weight, objectives::Reduction::Sum};
  const std::vector<double> unit_weights(data.rule_a.rows(), 1.0);

  out.history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Tape tape;
    opt.zero_grad();
    Var jepa = objectives::loss_jepa_data(tape, m, data.x, data.y);
    std::optional<Var> rule;
    if (variant == SyntheticVariant::RiJepa) {
      rule = objectives::loss_ebc(tape, m, data.rule_a, data.rule_c, data.neg_a, data.neg_c, ebc);
    } else if (variant == SyntheticVariant::Pairwise) {
      Var z = m.encode_context(tape, tape.constant(data.rule_a), Modality::Rule, Binding::Trainable);
      Var pred = m.predict(tape, z, Binding::Trainable);
      Var tgt = m.encode_target(tape, tape.constant(data.rule_c), Modality::Rule, Binding::Trainable);
      rule = objectives::loss_rbjepa(tape, pred, tgt, unit_weights);
    }
    Var total = objectives::loss_total(tape, jepa, rule ? &*rule : nullptr, cfg.beta, nullptr, 0.0);
    const auto c = components(tape, jepa, rule ? &*rule : nullptr, total);
    if (!std::isfinite(c.total)) {
      throw NumericalError(out.name + ": non-finite loss at epoch " + std::to_string(epoch));
    }
    out.history.push_back(c);
    tape.backward(total);
    opt.step();
    m.update_target(cfg.ema_tau);
  }
  return out;
}

double mean_energy(const DualEncoderModel& m, const Tensor& a, const Tensor& c) {
  // Synthetic models share one encoder pair between data and rules.
  const auto e = m.energy(a, c, model::EnergyPair::DataToData);
  if (e.empty()) throw std::invalid_argument("mean_energy: empty input");
  double s = 0.0;
  for (double v : e) s += v;
  return s / static_cast<double>(e.size());
}

Tensor rasterize_energy(const DualEncoderModel& m, const GridSpec& grid, const Vec3& offset) {
  if (grid.resolution < 2 || !(grid.lo < grid.hi)) throw std::invalid_argument("rasterize_energy: bad grid");
  const std::size_t r = grid.resolution;
  const double step = (grid.hi - grid.lo) / static_cast<double>(r - 1);
  Tensor a(r * r, 3);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      a(i * r + j, 0) = grid.lo + step * static_cast<double>(i);
      a(i * r + j, 1) = grid.lo + step * static_cast<double>(j);
    }
  const auto e = m.energy(a, shifted(a, offset), model::EnergyPair::DataToData);
  Tensor out(r * r, 3);
  for (std::size_t k = 0; k < r * r; ++k) {
    out(k, 0) = a(k, 0);
    out(k, 1) = a(k, 1);
    out(k, 2) = e[k];
  }
  return out;
}

GridSummary summarize_grid(const Tensor& grid) {
  if (grid.rows() == 0 || grid.cols() != 3) throw DimensionError("summarize_grid: expected n×3 rows");
  GridSummary s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -s.min;
  double upper = s.min, lower = s.min;
  for (std::size_t k = 0; k < grid.rows(); ++k) {
    const double x = grid(k, 0), y = grid(k, 1), e = grid(k, 2);
    s.min = std::min(s.min, e);
    s.max = std::max(s.max, e);
    if (x + y > 0.0 && e < upper) {
      upper = e;
      s.argmin_upper = {x, y};
    }
    if (x + y < 0.0 && e < lower) {
      lower = e;
      s.argmin_lower = {x, y};
    }
  }
  return s;
}

const SyntheticModelReport& SyntheticReport::find(const std::string& name) const {
  for (const auto& m : models)
    if (m.name == name) return m;
  throw std::out_of_range("no synthetic model named " + name);
}

SyntheticReport run_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const RngStream master(cfg.seed);
  SyntheticReport r;
  r.config = cfg;
  r.data = make_synthetic_data(cfg, master);

  std::vector<SyntheticVariant> variants{SyntheticVariant::Classic};
  if (cfg.train_pairwise) variants.push_back(SyntheticVariant::Pairwise);
  variants.push_back(SyntheticVariant::RiJepa);

  const GridSpec grid{cfg.grid_lo, cfg.grid_hi, cfg.grid_resolution};
  for (auto v : variants) {
    r.trained.push_back(train_synthetic(v, r.data, cfg, master));
    const auto& t = r.trained.back();
    SyntheticModelReport rep;
    rep.name = t.name;
    rep.id_energy = mean_energy(t.model, r.data.id_a, r.data.id_c);
    rep.ood_energy = mean_energy(t.model, r.data.ood_a, r.data.ood_c);
    rep.final_loss = t.history.back();
    rep.grid = rasterize_energy(t.model, grid, cfg.rule_offset);
    rep.grid_summary = summarize_grid(rep.grid);
    r.models.push_back(std::move(rep));
  }

  // One projection shared by every model's context embeddings of both test sets.
  std::vector<Tensor> blocks;
  for (const auto& t : r.trained) {
    for (const auto& [set, a] : {std::pair<const char*, const Tensor*>{"id", &r.data.id_a}, {"ood", &r.data.ood_a}}) {
      blocks.push_back(t.model.context_latent(*a, Modality::Data));
      r.pca_model.insert(r.pca_model.end(), a->rows(), t.name);
      r.pca_set.insert(r.pca_set.end(), a->rows(), set);
    }
  }
  Tensor all(r.pca_model.size(), blocks.front().cols());
  std::size_t row = 0;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.rows(); ++i, ++row) std::copy(b.row_span(i).begin(), b.row_span(i).end(), all.row_span(row).begin());
  r.pca = pca_fit_project(all, 2);
  return r;
}

json synthetic_metrics(const SyntheticReport& r) {
  json models = json::object();
  for (const auto& m : r.models) {
    models[m.name] = {
        {"id_energy", round6(m.id_energy)},
        {"ood_energy", round6(m.ood_energy)},
        {"ood_id_ratio", round6(m.ood_energy / m.id_energy)},
        {"final_loss", {{"jepa", round6(m.final_loss.jepa)}, {"rule", round6(m.final_loss.ebc)}, {"total", round6(m.final_loss.total)}}},
        {"grid", {{"min", round6(m.grid_summary.min)},
                  {"max", round6(m.grid_summary.max)},
                  {"argmin_upper", round6(std::vector<double>(m.grid_summary.argmin_upper.begin(), m.grid_summary.argmin_upper.end()))},
                  {"argmin_lower", round6(std::vector<double>(m.grid_summary.argmin_lower.begin(), m.grid_summary.argmin_lower.end()))}}}};
  }
  return {{"experiment", "synthetic"},
          {"seed", r.config.seed},
          {"models", models},
          {"pca_explained_ratio", round6(r.pca.explained_ratio)}};
}

void write_synthetic_report(const SyntheticReport& r, const std::filesystem::path& dir) {
  ensure_directory(dir);
  {
    CsvWriter csv(dir / "energy_table.csv", {"model", "id_energy", "ood_energy", "ood_id_ratio"});
    for (const auto& m : r.models) {
      csv.cell(m.name).cell(m.id_energy).cell(m.ood_energy).cell(m.ood_energy / m.id_energy);
      csv.end_row();
    }
  }
  for (const auto& m : r.models) {
    CsvWriter csv(dir / ("landscape_" + m.name + ".csv"), {"x", "y", "energy"});
    for (std::size_t k = 0; k < m.grid.rows(); ++k) {
      csv.cells(m.grid.row_span(k));
      csv.end_row();
    }
  }
  {
    CsvWriter csv(dir / "pca_projection.csv", {"model", "set", "pc1", "pc2"});
    for (std::size_t k = 0; k < r.pca.projected.rows(); ++k) {
      csv.cell(r.pca_model[k]).cell(r.pca_set[k]).cells(r.pca.projected.row_span(k));
      csv.end_row();
    }
  }
  write_json(dir / "metrics.json", synthetic_metrics(r));

  json manifest{{"experiment", "synthetic"}, {"models", json::object()}};
  for (const auto& t : r.trained) {
    json ctx{{"experiment", "synthetic"},
             {"model", t.name},
             {"config", to_json(r.config)},
             {"rule_offset", r.config.rule_offset},
             {"training_inputs", tensor_to_json(r.data.x)}};
    const std::string file = "model_" + t.name + ".ckpt";
    write_bundle(dir / file, t.model, r.config.seed, ctx);
    manifest["models"][t.name] = {{"checkpoint", file}, {"spec", model::to_json(t.model.spec())}};
  }
  write_json(dir / "manifest.json", manifest);
}

}  // namespace rijepa::experiments
