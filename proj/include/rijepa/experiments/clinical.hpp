#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rijepa/discover/domains.hpp"
#include "rijepa/experiments/cleveland.hpp"
#include "rijepa/experiments/probe.hpp"
#include "rijepa/experiments/training.hpp"
#include "rijepa/rulemine/rules.hpp"

namespace rijepa::experiments {

struct ClinicalConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 111;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double alpha = 2.0;  // EBC weight
  double beta = 5.0;   // anchor weight
  double margin = 2.0;
  double invalid_weight = 1.0;
  double ema_tau = 0.99;
  double clip_norm = 1.0;
  double min_support = 0.04;
  double min_confidence = 0.70;
  std::size_t max_antecedent = 4;
  double p_mask = 0.3;
  std::size_t rules_per_batch = 32;
  // false trains the Classic baseline only.
  bool train_rules = true;
  // Discovery runs after training.
  std::size_t discovery_chains = 8;
  double langevin_step = 0.1;
  double langevin_temperature = 1e-4;
  std::size_t langevin_iterations = 100;
  std::size_t decode_k = 10;
  ProbeOptions probe;

  void validate() const;
};

nlohmann::json to_json(const ClinicalConfig& c);
ClinicalConfig clinical_config_from_json(const nlohmann::json& j);

// Split, features, transactions and the mined knowledge base.
struct ClinicalData {
  std::vector<PatientRecord> train, test;
  SplitIndices split;
  FeatureEncoder encoder;
  Tensor x_train, x_test;
  std::vector<int> y_train, y_test;
  // Vocabulary covers every record, so test patients always discretize.
  rulemine::Vocabulary vocabulary;
  std::vector<rulemine::Transaction> train_transactions;
  std::vector<rulemine::RuleTuple> rules;
};

ClinicalData prepare_clinical(const ClevelandData& data, const ClinicalConfig& cfg);

// Mines the risk-consequent rules of the given transactions.
std::vector<rulemine::RuleTuple> mine_risk_rules(const std::vector<rulemine::Transaction>& transactions,
                                                 double min_support, double min_confidence,
                                                 std::size_t max_antecedent);

// Minibatch AdamW with clipping and EMA. Batches and masks come from
// master.substream("batches"), rule samples from master.substream("rules"),
// both keyed by epoch, so every variant sees the same data stream.
// Throws NumericalError naming the epoch on a non-finite loss.
TrainedModel train_clinical(bool with_rules, const ClinicalData& data, const ClinicalConfig& cfg,
                            const RngStream& master);

struct ClinicalEvaluation {
  std::string name;
  ProbeResult probe;
  std::optional<double> zero_shot;      // models with a rule pathway only
  std::optional<double> fallback_norm;  // ‖g(f_c_rule(0))‖
  std::optional<model::RiskPoles> poles;
};

ClinicalEvaluation evaluate_clinical(const TrainedModel& t, const ClinicalData& data, const ProbeOptions& probe);

// Classic JEPA has no poles; asking for its zero-shot accuracy is an error.
double zero_shot_accuracy(const model::DualEncoderModel& m, const rulemine::Vocabulary& vocabulary,
                          const Tensor& x, const std::vector<int>& y);

struct DiscoveryRun {
  std::string name;  // joint, forward, abductive, marginal
  discover::LangevinConfig config;
  std::string condition, outcome;
  std::vector<discover::DiscoveryStep> steps;
  nlohmann::json report;
};

// Index of the chain with the lowest final energy.
std::size_t lowest_energy_chain(const std::vector<discover::DiscoveryStep>& steps);

// Tokens the paper associates with each paradigm's profile.
struct ReferenceProfile {
  std::string paradigm;
  std::vector<std::vector<std::string>> markers;  // each entry: any of these tokens counts
};
const std::vector<ReferenceProfile>& reference_profiles();
// Markers of `ref` hit by the decoded tokens.
std::vector<std::string> marker_overlap(const ReferenceProfile& ref, const std::vector<std::string>& tokens);

// Young, fit, low-risk patient profile used for the translation check.
PatientRecord young_high_thalach_patient();

struct PatientTranslation {
  std::string label;
  std::vector<double> features;
  discover::DecodedProfile profile;
};

struct ClinicalReport {
  ClinicalConfig config;
  ClinicalData data;
  std::vector<TrainedModel> trained;
  std::vector<ClinicalEvaluation> evaluations;
  std::vector<DiscoveryRun> discovery;
  std::vector<PatientTranslation> translations;

  const TrainedModel* find(const std::string& name) const;
  const DiscoveryRun* find_run(const std::string& name) const;
};

inline constexpr const char* kClassicName = "classic_jepa";
inline constexpr const char* kRiJepaName = "rijepa";

ClinicalReport run_clinical(const ClinicalConfig& cfg, const ClevelandData& data);

nlohmann::json clinical_metrics(const ClinicalReport& r);
// metrics.json, loss_curves.csv, rules.{txt,json}, discovery_*.json,
// discovery_*_energy.csv, model checkpoints; embeddings_<model>.csv on request.
void write_clinical_report(const ClinicalReport& r, const std::filesystem::path& dir, bool export_embeddings);

}  // namespace rijepa::experiments
