#include "rijepa/experiments/clinical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rijepa/experiments/bundle.hpp"
#include "rijepa/experiments/io.hpp"
#include "rijepa/model/symbolic.hpp"
#include "rijepa/numcore/errors.hpp"
#include "rijepa/numcore/format.hpp"
#include "rijepa/numcore/optim.hpp"
#include "rijepa/objectives/negatives.hpp"
#include "rijepa/rulemine/fp_growth.hpp"
#include "rijepa/rulemine/rule_io.hpp"

namespace rijepa::experiments {
namespace {

using model::Modality;
using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("clinical config: " + what);
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> idx) {
  Tensor out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto src = x.row_span(idx[i]);
    std::copy(src.begin(), src.end(), out.row_span(i).begin());
  }
  return out;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double positive_rate(const std::vector<int>& y) {
  if (y.empty()) return 0.0;
  return static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
}

std::vector<std::string> deduped_tokens(const discover::DecodedProfile& p) {
  std::vector<std::string> out;
  for (const auto& t : p.deduped) out.push_back(t.token);
  return out;
}

// Tokens of a chain that the paradigm is about.
std::vector<std::string> paradigm_tokens(const std::string& paradigm, const discover::Proposal& p) {
  if (paradigm == "forward") return deduped_tokens(p.consequent);
  if (paradigm == "abductive") return deduped_tokens(p.antecedent);
  auto out = deduped_tokens(p.antecedent);
  for (auto& t : deduped_tokens(p.consequent)) out.push_back(std::move(t));
  return out;
}

const ReferenceProfile& reference_for(const std::string& paradigm) {
  for (const auto& r : reference_profiles())
    if (r.paradigm == paradigm) return r;
  throw std::out_of_range("no reference profile for " + paradigm);
}

json overlap_json(const ReferenceProfile& ref, const std::vector<std::string>& tokens) {
  json markers = json::array();
  for (const auto& m : ref.markers) markers.push_back(m);
  const auto hit = marker_overlap(ref, tokens);
  return {{"reference_markers", markers},
          {"decoded", tokens},
          {"overlap", hit},
          {"overlap_count", hit.size()},
          {"marker_count", ref.markers.size()}};
}

json transactions_json(const std::vector<rulemine::Transaction>& ts) {
  json out = json::array();
  for (const auto& t : ts) out.push_back(t.tokens());
  return out;
}

}  // namespace

void ClinicalConfig::validate() const {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
  require(epochs > 0, "epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(weight_decay >= 0.0 && std::isfinite(weight_decay), "weight_decay must be non-negative");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be non-negative");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be non-negative");
  require(margin > 0.0 && std::isfinite(margin), "margin must be positive");
  require(invalid_weight >= 0.0 && std::isfinite(invalid_weight), "invalid_weight must be non-negative");
  require(ema_tau >= 0.0 && ema_tau <= 1.0, "ema_tau must lie in [0, 1]");
  require(clip_norm > 0.0, "clip_norm must be positive");
  require(min_support > 0.0 && min_support <= 1.0, "min_support must lie in (0, 1]");
  require(min_confidence > 0.0 && min_confidence <= 1.0, "min_confidence must lie in (0, 1]");
  require(max_antecedent > 0, "max_antecedent must be positive");
  require(p_mask >= 0.0 && p_mask < 1.0, "p_mask must lie in [0, 1)");
  require(rules_per_batch > 0, "rules_per_batch must be positive");
  require(discovery_chains > 0, "discovery_chains must be positive");
  require(langevin_step > 0.0 && std::isfinite(langevin_step), "langevin_step must be positive");
  require(langevin_temperature >= 0.0 && std::isfinite(langevin_temperature),
          "langevin_temperature must be non-negative");
  require(langevin_iterations > 0, "langevin_iterations must be positive");
  require(decode_k > 0, "decode_k must be positive");
  require(probe.learning_rate > 0.0 && probe.iterations > 0 && probe.l2 >= 0.0, "bad probe settings");
}

json to_json(const ClinicalConfig& c) {
  return {{"train_fraction", c.train_fraction},
          {"seed", c.seed},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"margin", c.margin},
          {"invalid_weight", c.invalid_weight},
          {"ema_tau", c.ema_tau},
          {"clip_norm", c.clip_norm},
          {"min_support", c.min_support},
          {"min_confidence", c.min_confidence},
          {"max_antecedent", c.max_antecedent},
          {"p_mask", c.p_mask},
          {"rules_per_batch", c.rules_per_batch},
          {"train_rules", c.train_rules},
          {"discovery_chains", c.discovery_chains},
          {"langevin_step", c.langevin_step},
          {"langevin_temperature", c.langevin_temperature},
          {"langevin_iterations", c.langevin_iterations},
          {"decode_k", c.decode_k},
          {"probe_learning_rate", c.probe.learning_rate},
          {"probe_iterations", c.probe.iterations},
          {"probe_l2", c.probe.l2}};
}

ClinicalConfig clinical_config_from_json(const json& j) {
  ClinicalConfig c;
  ConfigReader r(j, "clinical");
  r.read("train_fraction", c.train_fraction);
  r.read("seed", c.seed);
  r.read("epochs", c.epochs);
  r.read("batch_size", c.batch_size);
  r.read("learning_rate", c.learning_rate);
  r.read("weight_decay", c.weight_decay);
  r.read("alpha", c.alpha);
  r.read("beta", c.beta);
  r.read("margin", c.margin);
  r.read("invalid_weight", c.invalid_weight);
  r.read("ema_tau", c.ema_tau);
  r.read("clip_norm", c.clip_norm);
  r.read("min_support", c.min_support);
  r.read("min_confidence", c.min_confidence);
  r.read("max_antecedent", c.max_antecedent);
  r.read("p_mask", c.p_mask);
  r.read("rules_per_batch", c.rules_per_batch);
  r.read("train_rules", c.train_rules);
  r.read("discovery_chains", c.discovery_chains);
  r.read("langevin_step", c.langevin_step);
  r.read("langevin_temperature", c.langevin_temperature);
  r.read("langevin_iterations", c.langevin_iterations);
  r.read("decode_k", c.decode_k);
  r.read("probe_learning_rate", c.probe.learning_rate);
  r.read("probe_iterations", c.probe.iterations);
  r.read("probe_l2", c.probe.l2);
  r.finish();
  c.validate();
  return c;
}

std::vector<rulemine::RuleTuple> mine_risk_rules(const std::vector<rulemine::Transaction>& transactions,
                                                 double min_support, double min_confidence,
                                                 std::size_t max_antecedent) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(transactions.size());
  for (const auto& t : transactions) tokens.push_back(t.tokens());
  rulemine::FpGrowthOptions fp;
  fp.min_support = min_support;
  fp.max_length = max_antecedent + 1;
  const auto itemsets = rulemine::fp_growth(tokens, fp);
  rulemine::RuleOptions ro;
  ro.min_confidence = min_confidence;
  ro.max_antecedent = max_antecedent;
  return rulemine::generate_rules(itemsets, ro, rulemine::risk_consequent_filter());
}

ClinicalData prepare_clinical(const ClevelandData& data, const ClinicalConfig& cfg) {
  cfg.validate();
  if (data.records.size() < 4) throw std::invalid_argument("clinical study needs at least 4 records");
  const RngStream master(cfg.seed);
  ClinicalData d;
  const auto y = labels(data.records);
  d.split = stratified_split(y, cfg.train_fraction, master.substream("split"));
  if (d.split.train.empty() || d.split.test.empty()) throw std::invalid_argument("split left an empty side");
  d.train = select(data.records, d.split.train);
  d.test = select(data.records, d.split.test);
  d.y_train = labels(d.train);
  d.y_test = labels(d.test);
  d.encoder = FeatureEncoder::fit(d.train);
  d.x_train = d.encoder.encode(d.train);
  d.x_test = d.encoder.encode(d.test);

  auto all = rulemine::discretize(raw_table(data.records), rulemine::default_clinical_binning());
  d.vocabulary = std::move(all.vocabulary);
  d.train_transactions = select(all.transactions, d.split.train);
  d.rules = mine_risk_rules(d.train_transactions, cfg.min_support, cfg.min_confidence, cfg.max_antecedent);
  return d;
}

TrainedModel train_clinical(bool with_rules, const ClinicalData& data, const ClinicalConfig& cfg,
                            const RngStream& master) {
  cfg.validate();
  if (with_rules && data.rules.empty()) throw std::invalid_argument("no mined rules to train the rule pathway on");
  const auto spec = model::ModelSpec::clinical(data.x_train.cols(), data.vocabulary.size(), with_rules);
  TrainedModel out{with_rules ? kRiJepaName : kClassicName,
                   model::DualEncoderModel(spec, master.substream("model")), {}};
  model::DualEncoderModel& m = out.model;
  AdamWOptions adam;
  adam.learning_rate = cfg.learning_rate;
  adam.weight_decay = cfg.weight_decay;
  AdamW opt(m.trainable_parameters(), adam);
  const objectives::EbcOptions ebc{cfg.margin, cfg.invalid_weight, objectives::Reduction::Mean};

  const std::size_t n = data.x_train.rows();
  const RngStream batch_root = master.substream("batches");
  const RngStream rule_root = master.substream("rules");
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::string key = "epoch" + std::to_string(epoch);
    RngStream batch_rng = batch_root.substream(key);
    RngStream rule_rng = rule_root.substream(key);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    batch_rng.shuffle(order);
    std::optional<model::RiskPoles> poles;
    if (with_rules) poles = model::compute_poles(m, data.vocabulary);

    objectives::LossComponents sum;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batches) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(cfg.batch_size, n - start));
      const Tensor x = gather_rows(data.x_train, idx);
      std::vector<int> y;
      for (std::size_t i : idx) y.push_back(data.y_train[i]);
      const Tensor x_context = model::mask_context(x, cfg.p_mask, batch_rng);

      Tape tape;
      opt.zero_grad();
      Var jepa = objectives::loss_jepa_data(tape, m, x_context, x);
      objectives::LossComponents c;
      Var total = jepa;
      if (with_rules) {
        std::vector<rulemine::RuleTuple> sampled;
        for (std::size_t k = 0; k < cfg.rules_per_batch; ++k)
          sampled.push_back(data.rules[rule_rng.below(data.rules.size())]);
        const auto negatives = objectives::make_negatives_clinical(sampled, rule_rng);
        Var e = objectives::loss_ebc(tape, m, model::encode_antecedents(sampled, data.vocabulary),
                                     model::encode_consequents(sampled, data.vocabulary),
                                     model::encode_antecedents(negatives, data.vocabulary),
                                     model::encode_consequents(negatives, data.vocabulary), ebc);
        Var a = objectives::loss_anchor(tape, m, x_context, y, *poles);
        total = objectives::loss_total(tape, jepa, &e, cfg.alpha, &a, cfg.beta);
        c.ebc = tape.scalar(e);
        c.anchor = tape.scalar(a);
      } else {
        total = objectives::loss_total(tape, jepa, nullptr, 0.0, nullptr, 0.0);
      }
      c.jepa = tape.scalar(jepa);
      c.total = tape.scalar(total);
      if (!std::isfinite(c.total)) {
        throw NumericalError(out.name + ": non-finite loss at epoch " + std::to_string(epoch));
      }
      tape.backward(total);
      clip_grad_norm(opt.parameters(), cfg.clip_norm);
      opt.step();
      m.update_target(cfg.ema_tau);
      sum.jepa += c.jepa;
      sum.ebc += c.ebc;
      sum.anchor += c.anchor;
      sum.total += c.total;
    }
    const double nb = static_cast<double>(batches);
    out.history.push_back({sum.jepa / nb, sum.ebc / nb, sum.anchor / nb, sum.total / nb});
  }
  return out;
}

double zero_shot_accuracy(const model::DualEncoderModel& m, const rulemine::Vocabulary& vocabulary, const Tensor& x,
                          const std::vector<int>& y) {
  if (!m.has_rules()) throw std::logic_error("zero-shot accuracy is undefined for a model without rule poles");
  const auto poles = model::compute_poles(m, vocabulary);
  const auto res = model::zero_shot_classify(m, x, poles);
  std::vector<int> pred;
  for (const auto& r : res) pred.push_back(r.label);
  return accuracy(pred, y);
}

ClinicalEvaluation evaluate_clinical(const TrainedModel& t, const ClinicalData& data, const ProbeOptions& probe) {
  ClinicalEvaluation e;
  e.name = t.name;
  const Tensor train = t.model.context_latent(data.x_train, Modality::Data);
  const Tensor test = t.model.context_latent(data.x_test, Modality::Data);
  e.probe = linear_probe(train, data.y_train, test, data.y_test, probe);
  if (t.model.has_rules()) {
    e.poles = model::compute_poles(t.model, data.vocabulary);
    e.zero_shot = zero_shot_accuracy(t.model, data.vocabulary, data.x_test, data.y_test);
    const Tensor null_rule(1, t.model.input_dim(Modality::Rule));
    e.fallback_norm = norm(t.model.forward_rule(null_rule).row_span(0));
  }
  return e;
}

std::size_t lowest_energy_chain(const std::vector<discover::DiscoveryStep>& steps) {
  if (steps.empty()) throw std::invalid_argument("no chains");
  std::size_t best = 0;
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (steps[i].chain.energy.back() < steps[best].chain.energy.back()) best = i;
  return best;
}

const std::vector<ReferenceProfile>& reference_profiles() {
  static const std::vector<ReferenceProfile> profiles{
      {"joint",
       {{"chol_level=Normal"},
        {"trestbps_level=Elevated"},
        {"restecg=2.0"},
        {"slope=3.0"},
        {"cp=1.0"},
        {"target_risk=1.0"},
        {"fbs=1.0"}}},
      {"forward", {{"target_risk=1.0"}, {"thalach_level=Medium"}, {"exang=1.0"}, {"cp=4.0"}, {"restecg=2.0"}}},
      {"abductive",
       {{"exang=1.0"}, {"thalach_level=Low", "thalach_level=Medium"}, {"slope=3.0"}, {"age_group=Senior"}}},
      {"marginal",
       {{"target_risk=0.0"}, {"restecg=0.0"}, {"slope=1.0"}, {"thalach_level=High"}, {"exang=0.0"}}},
  };
  return profiles;
}

std::vector<std::string> marker_overlap(const ReferenceProfile& ref, const std::vector<std::string>& tokens) {
  const std::set<std::string> have(tokens.begin(), tokens.end());
  std::vector<std::string> hit;
  for (const auto& alternatives : ref.markers)
    for (const auto& t : alternatives)
      if (have.count(t)) {
        hit.push_back(t);
        break;
      }
  return hit;
}

PatientRecord young_high_thalach_patient() {
  PatientRecord p;
  p.age = 35;
  p.sex = 0;
  p.cp = 3;
  p.trestbps = 120;
  p.chol = 190;
  p.fbs = 0;
  p.restecg = 0;
  p.thalach = 180;
  p.exang = 0;
  p.oldpeak = 0;
  p.slope = 1;
  p.ca = 0;
  p.thal = 3;
  return p;
}

const TrainedModel* ClinicalReport::find(const std::string& name) const {
  for (const auto& t : trained)
    if (t.name == name) return &t;
  return nullptr;
}

const DiscoveryRun* ClinicalReport::find_run(const std::string& name) const {
  for (const auto& r : discovery)
    if (r.name == name) return &r;
  return nullptr;
}

ClinicalReport run_clinical(const ClinicalConfig& cfg, const ClevelandData& input) {
  cfg.validate();
  ClinicalReport r;
  r.config = cfg;
  r.data = prepare_clinical(input, cfg);
  const RngStream master(cfg.seed);

  r.trained.push_back(train_clinical(false, r.data, cfg, master));
  if (cfg.train_rules) r.trained.push_back(train_clinical(true, r.data, cfg, master));
  for (const auto& t : r.trained) r.evaluations.push_back(evaluate_clinical(t, r.data, cfg.probe));

  const TrainedModel* ri = r.find(kRiJepaName);
  if (!ri) return r;

  const rulemine::TransactionIndex knowledge(r.data.train_transactions);
  const auto domain = discover::clinical_domain(ri->model, r.data.vocabulary, knowledge, r.data.x_train,
                                                {cfg.decode_k, true});
  const RngStream discovery_root = master.substream("discovery");
  const std::vector<std::tuple<std::string, discover::LangevinMode, std::string, std::string>> plan{
      {"joint", discover::LangevinMode::Joint, "", ""},
      {"forward", discover::LangevinMode::Forward, "age_group=Senior", ""},
      {"abductive", discover::LangevinMode::Abductive, "", rulemine::kHighRisk},
      {"marginal", discover::LangevinMode::Marginal, "", ""},
  };
  for (const auto& [name, mode, condition, outcome] : plan) {
    DiscoveryRun run;
    run.name = name;
    run.config.step_size = cfg.langevin_step;
    run.config.temperature = cfg.langevin_temperature;
    run.config.iterations = cfg.langevin_iterations;
    run.config.mode = mode;
    run.condition = condition;
    run.outcome = outcome;
    run.steps = discover::run_discovery(ri->model, domain, run.config, cfg.discovery_chains,
                                        discovery_root.substream(name), condition, outcome);
    run.report = discover::discovery_report(domain, run.config, run.steps, condition, outcome);
    const auto& ref = reference_for(name);
    const std::size_t best = lowest_energy_chain(run.steps);
    run.report["reference"] = overlap_json(ref, paradigm_tokens(name, run.steps[best].proposal));
    run.report["reference"]["selected_chain"] = best;
    run.report["reference"]["selection"] = "lowest final energy";
    json per_chain = json::array();
    for (const auto& s : run.steps) per_chain.push_back(marker_overlap(ref, paradigm_tokens(name, s.proposal)).size());
    run.report["reference"]["overlap_count_per_chain"] = per_chain;
    r.discovery.push_back(std::move(run));
  }

  // Patient translations: a constructed young, fit patient and the test
  // patient with the largest thalach-minus-age standard score among the healthy.
  r.translations.push_back({"constructed young patient with high max heart rate",
                            r.data.encoder.encode(young_high_thalach_patient()), {}});
  std::optional<std::size_t> pick;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.data.test.size(); ++i) {
    if (r.data.y_test[i] != 0) continue;
    // Columns 0 (age) and 3 (thalach) are the z-scored continuous features.
    const double score = r.data.x_test(i, 3) - r.data.x_test(i, 0);
    if (score > best_score) {
      best_score = score;
      pick = i;
    }
  }
  if (pick) {
    r.translations.push_back({"test patient #" + std::to_string(r.data.split.test[*pick]) + " (record index)",
                              r.data.x_test.row_vector(*pick), {}});
  }
  for (auto& t : r.translations)
    t.profile = discover::translate_patient(ri->model, t.features, r.data.vocabulary, cfg.decode_k, true);
  return r;
}

json clinical_metrics(const ClinicalReport& r) {
  json models = json::object();
  json probe = json::object(), zero_shot = json::object(), fallback = json::object();
  for (std::size_t i = 0; i < r.evaluations.size(); ++i) {
    const auto& e = r.evaluations[i];
    const auto& t = r.trained[i];
    const auto& last = t.history.back();
    models[e.name] = {
        {"probe", {{"train_accuracy", round6(e.probe.train_accuracy)}, {"test_accuracy", round6(e.probe.test_accuracy)}}},
        {"final_loss",
         {{"jepa", round6(last.jepa)}, {"ebc", round6(last.ebc)}, {"anchor", round6(last.anchor)}, {"total", round6(last.total)}}},
        {"data_pathway_parameters", t.model.data_pathway_parameter_count()},
        {"parameter_checksum", model::parameter_checksum(t.model)}};
    probe[e.name] = round6(e.probe.test_accuracy);
    zero_shot[e.name] = e.zero_shot ? json(round6(*e.zero_shot)) : json(nullptr);
    fallback[e.name] = e.fallback_norm ? json(round6(*e.fallback_norm)) : json(nullptr);
  }
  const auto& d = r.data;
  return {{"experiment", "clinical"},
          {"seed", r.config.seed},
          {"dataset",
           {{"records", d.train.size() + d.test.size()},
            {"train", d.train.size()},
            {"test", d.test.size()},
            {"train_positive_rate", round6(positive_rate(d.y_train))},
            {"test_positive_rate", round6(positive_rate(d.y_test))},
            {"feature_width", d.x_train.cols()}}},
          {"vocabulary_size", d.vocabulary.size()},
          {"rule_count", d.rules.size()},
          {"probe", probe},
          {"zero_shot", zero_shot},
          {"fallback_norm", fallback},
          {"models", models}};
}

void write_clinical_report(const ClinicalReport& r, const std::filesystem::path& dir, bool export_embeddings) {
  ensure_directory(dir);
  write_json(dir / "metrics.json", clinical_metrics(r));
  {
    CsvWriter csv(dir / "loss_curves.csv", {"epoch", "model", "jepa", "ebc", "anchor", "total"});
    for (const auto& t : r.trained)
      for (std::size_t e = 0; e < t.history.size(); ++e) {
        const auto& c = t.history[e];
        csv.cell(e).cell(t.name).cell(c.jepa).cell(c.ebc).cell(c.anchor).cell(c.total);
        csv.end_row();
      }
  }
  rulemine::write_rules_text(dir / "rules.txt", r.data.rules);
  rulemine::write_rules_json(dir / "rules.json", r.data.rules);

  for (const auto& run : r.discovery) {
    json j = run.report;
    if (run.name == "marginal") {
      json list = json::array();
      const auto& ref = reference_for("marginal");
      for (const auto& t : r.translations) {
        const auto tokens = deduped_tokens(t.profile);
        list.push_back({{"patient", t.label},
                        {"features", round6(t.features)},
                        {"profile", discover::to_json(t.profile)},
                        {"reference", overlap_json(ref, tokens)}});
      }
      j["translations"] = std::move(list);
    }
    write_json(dir / ("discovery_" + run.name + ".json"), j);
    discover::write_energy_csv((dir / ("discovery_" + run.name + "_energy.csv")).string(), run.steps);
  }

  json context{{"experiment", "clinical"},
               {"config", to_json(r.config)},
               {"vocabulary", r.data.vocabulary.tokens()},
               {"binning", rulemine::to_json(rulemine::default_clinical_binning())},
               {"encoder", r.data.encoder.to_json()},
               {"feature_names", FeatureEncoder::feature_names()},
               {"split", {{"train", r.data.split.train}, {"test", r.data.split.test}}},
               {"training_inputs", tensor_to_json(r.data.x_train)},
               {"train_transactions", transactions_json(r.data.train_transactions)}};
  json manifest{{"experiment", "clinical"}, {"models", json::object()}};
  for (std::size_t i = 0; i < r.trained.size(); ++i) {
    const auto& t = r.trained[i];
    json ctx = context;
    ctx["model"] = t.name;
    if (r.evaluations[i].poles) ctx["poles"] = {{"high", r.evaluations[i].poles->high}, {"low", r.evaluations[i].poles->low}};
    const std::string file = "model_" + t.name + ".ckpt";
    write_bundle(dir / file, t.model, r.config.seed, ctx);
    manifest["models"][t.name] = {{"checkpoint", file}, {"spec", model::to_json(t.model.spec())}};
  }
  manifest["vocabulary"] = context["vocabulary"];
  manifest["binning"] = context["binning"];
  manifest["encoder"] = context["encoder"];
  manifest["split"] = context["split"];
  write_json(dir / "manifest.json", manifest);

  if (export_embeddings) {
    for (const auto& t : r.trained) {
      std::vector<std::string> header{"split", "index", "label"};
      for (std::size_t k = 0; k < t.model.latent_dim(); ++k) header.push_back("z" + std::to_string(k));
      CsvWriter csv(dir / ("embeddings_" + t.name + ".csv"), header);
      for (const auto& [split, x, y, idx] :
           {std::tuple{"train", &r.data.x_train, &r.data.y_train, &r.data.split.train},
            std::tuple{"test", &r.data.x_test, &r.data.y_test, &r.data.split.test}}) {
        const Tensor z = t.model.context_latent(*x, Modality::Data);
        for (std::size_t i = 0; i < z.rows(); ++i) {
          csv.cell(std::string(split)).cell((*idx)[i]).cell((*y)[i]).cells(z.row_span(i));
          csv.end_row();
        }
      }
    }
  }
}

}  // namespace rijepa::experiments
