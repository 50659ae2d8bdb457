// rijepa: command-line driver for the synthetic and clinical studies, rule
// mining and latent rule discovery.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "rijepa/discover/domains.hpp"
#include "rijepa/experiments/bundle.hpp"
#include "rijepa/experiments/clinical.hpp"
#include "rijepa/experiments/io.hpp"
#include "rijepa/experiments/synthetic.hpp"
#include "rijepa/numcore/checkpoint.hpp"
#include "rijepa/numcore/errors.hpp"
#include "rijepa/numcore/format.hpp"
#include "rijepa/rulemine/discretize.hpp"
#include "rijepa/rulemine/rule_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rijepa;
using namespace rijepa::experiments;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string checkpoint;
  std::string mode = "joint";
  std::optional<std::size_t> chains;
  std::optional<double> alpha, beta, margin;
  bool skip_rules = false;
  bool export_embeddings = false;
  std::string condition, outcome;
};

json load_config(const Options& o) {
  if (o.config.empty()) return json::object();
  return read_json(o.config);
}

// --seed, then a seed in the config file, then RIJEPA_SEED.
void resolve_seed(const Options& o, json& cfg) {
  if (o.seed) {
    cfg["seed"] = *o.seed;
    return;
  }
  if (cfg.contains("seed")) return;
  if (const char* env = std::getenv("RIJEPA_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      cfg["seed"] = v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("RIJEPA_SEED is not an unsigned integer: '") + env + "'");
    }
  }
}

fs::path output_dir(const Options& o, const std::string& command) {
  const fs::path dir = o.out.empty() ? fs::path("out") / command : fs::path(o.out);
  ensure_directory(dir);
  return dir;
}

void write_snapshot(const fs::path& dir, const std::string& command, const json& resolved, const json& inputs) {
  write_json(dir / "resolved_config.json", resolved);
  write_json(dir / "run.json", {{"command", command}, {"inputs", inputs}, {"config", "resolved_config.json"}});
}

ClevelandData load_dataset(const Options& o) {
  if (o.dataset.empty()) throw ConfigError("--dataset is required");
  return load_cleveland(o.dataset);
}

int cmd_synthetic(const Options& o) {
  json raw = load_config(o);
  resolve_seed(o, raw);
  if (o.beta) raw["beta"] = *o.beta;
  if (o.margin) raw["margin"] = *o.margin;
  const auto cfg = synthetic_config_from_json(raw);
  const auto dir = output_dir(o, "synthetic");
  write_snapshot(dir, "synthetic", to_json(cfg), json::object());
  const auto report = run_synthetic(cfg);
  write_synthetic_report(report, dir);
  for (const auto& m : report.models) {
    std::cout << m.name << ": id_energy=" << format_number(m.id_energy) << " ood_energy=" << format_number(m.ood_energy)
              << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int cmd_clinical(const Options& o) {
  json raw = load_config(o);
  resolve_seed(o, raw);
  if (o.alpha) raw["alpha"] = *o.alpha;
  if (o.beta) raw["beta"] = *o.beta;
  if (o.margin) raw["margin"] = *o.margin;
  if (o.chains) raw["discovery_chains"] = *o.chains;
  if (o.skip_rules) raw["train_rules"] = false;
  const auto cfg = clinical_config_from_json(raw);
  const auto data = load_dataset(o);
  const auto dir = output_dir(o, "clinical");
  write_snapshot(dir, "clinical", to_json(cfg),
                 {{"dataset", fs::absolute(o.dataset).string()}, {"export_embeddings", o.export_embeddings}});
  const auto report = run_clinical(cfg, data);
  write_clinical_report(report, dir, o.export_embeddings);
  const auto m = clinical_metrics(report);
  std::cout << "rules=" << m["rule_count"] << " probe=" << m["probe"].dump() << " zero_shot=" << m["zero_shot"].dump()
            << " fallback_norm=" << m["fallback_norm"].dump() << "\n";
  std::cout << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int cmd_mine(const Options& o) {
  json raw = load_config(o);
  resolve_seed(o, raw);
  const auto cfg = clinical_config_from_json(raw);
  const auto data = load_dataset(o);
  const auto dir = output_dir(o, "mine");
  write_snapshot(dir, "mine", to_json(cfg), {{"dataset", fs::absolute(o.dataset).string()}});
  // Same split and transactions as the clinical study.
  const auto prepared = prepare_clinical(data, cfg);
  rulemine::write_rules_text(dir / "rules.txt", prepared.rules);
  rulemine::write_rules_json(dir / "rules.json", prepared.rules);
  rulemine::write_transactions_csv(dir / "transactions.csv", prepared.train_transactions);
  std::cout << prepared.rules.size() << " rules from " << prepared.train_transactions.size()
            << " training transactions\n";
  std::cout << "wrote " << dir.string() << "\n";
  return kExitOk;
}

struct DiscoverConfig {
  std::uint64_t seed = 111;
  std::size_t chains = 8;
  double step_size = 0.1;
  double temperature = 1e-4;
  std::size_t iterations = 100;
  std::size_t decode_k = 10;
  bool median_threshold = true;
  std::size_t grid_points_per_axis = 21;
};

json to_json(const DiscoverConfig& c) {
  return {{"seed", c.seed},
          {"chains", c.chains},
          {"step_size", c.step_size},
          {"temperature", c.temperature},
          {"iterations", c.iterations},
          {"decode_k", c.decode_k},
          {"median_threshold", c.median_threshold},
          {"grid_points_per_axis", c.grid_points_per_axis}};
}

DiscoverConfig discover_config_from_json(const json& j) {
  DiscoverConfig c;
  ConfigReader r(j, "discover");
  r.read("seed", c.seed);
  r.read("chains", c.chains);
  r.read("step_size", c.step_size);
  r.read("temperature", c.temperature);
  r.read("iterations", c.iterations);
  r.read("decode_k", c.decode_k);
  r.read("median_threshold", c.median_threshold);
  r.read("grid_points_per_axis", c.grid_points_per_axis);
  r.finish();
  if (c.chains == 0) throw ConfigError("discover: chains must be positive");
  if (c.decode_k == 0) throw ConfigError("discover: decode_k must be positive");
  return c;
}

int cmd_discover(const Options& o) {
  json raw = load_config(o);
  resolve_seed(o, raw);
  if (o.chains) raw["chains"] = *o.chains;
  const auto cfg = discover_config_from_json(raw);
  discover::LangevinConfig lc;
  lc.step_size = cfg.step_size;
  lc.temperature = cfg.temperature;
  lc.iterations = cfg.iterations;
  try {
    lc.mode = discover::parse_langevin_mode(o.mode);
    lc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("discover: ") + e.what());
  }
  if (o.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  if (!fs::exists(o.checkpoint)) throw IoError("checkpoint not found: " + o.checkpoint);
  const auto bundle = read_bundle(o.checkpoint);
  const auto& ctx = bundle.context;
  const std::string experiment = ctx.value("experiment", "");
  const Tensor inputs = tensor_from_json(ctx.at("training_inputs"));

  std::optional<rulemine::Vocabulary> vocabulary;
  std::optional<rulemine::TransactionIndex> knowledge;
  discover::Domain domain;
  if (experiment == "clinical") {
    vocabulary.emplace(ctx.at("vocabulary").get<std::vector<std::string>>());
    std::vector<rulemine::Transaction> ts;
    for (const auto& row : ctx.at("train_transactions")) {
      std::vector<rulemine::Item> items;
      for (const auto& t : row) items.push_back(rulemine::Item::parse(t.get<std::string>()));
      ts.emplace_back(std::move(items));
    }
    knowledge.emplace(std::move(ts));
    domain = discover::clinical_domain(bundle.model, *vocabulary, *knowledge, inputs, {cfg.decode_k, cfg.median_threshold});
  } else if (experiment == "synthetic") {
    discover::SyntheticDomainOptions so;
    so.points_per_axis = cfg.grid_points_per_axis;
    so.rule_offset = ctx.at("rule_offset").get<std::vector<double>>();
    domain = discover::synthetic_domain(bundle.model, inputs, so);
  } else {
    throw ConfigError("checkpoint does not name a known experiment");
  }

  const auto dir = output_dir(o, "discover");
  write_snapshot(dir, "discover", to_json(cfg),
                 {{"checkpoint", fs::absolute(o.checkpoint).string()},
                  {"mode", o.mode},
                  {"condition", o.condition},
                  {"outcome", o.outcome}});
  std::vector<discover::DiscoveryStep> steps;
  try {
    steps = discover::run_discovery(bundle.model, domain, lc, cfg.chains, RngStream(cfg.seed), o.condition, o.outcome);
  } catch (const rulemine::VocabularyError& e) {
    throw ConfigError(std::string("discover: ") + e.what());
  }
  const std::string stem = "discovery_" + discover::to_string(lc.mode);
  write_json(dir / (stem + ".json"), discover::discovery_report(domain, lc, steps, o.condition, o.outcome));
  discover::write_energy_csv((dir / (stem + "_energy.csv")).string(), steps);
  std::cout << steps.size() << " chains, mode " << discover::to_string(lc.mode) << "\n";
  std::cout << "wrote " << dir.string() << "\n";
  return kExitOk;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitInput;
  } catch (const rulemine::BinningError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-informed JEPA experiments, rule mining and latent rule discovery"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* c) {
    c->add_option("--config", o.config, "JSON config; missing keys take their defaults");
    c->add_option("--seed", o.seed, "master seed (falls back to the config, then RIJEPA_SEED)");
    c->add_option("--out", o.out, "output directory");
  };

  auto* syn = app.add_subcommand("synthetic", "3-D energy landscape study");
  common(syn);
  syn->add_option("--beta", o.beta, "rule loss weight");
  syn->add_option("--margin", o.margin, "EBC margin");

  auto* cli = app.add_subcommand("clinical", "Cleveland heart disease study");
  common(cli);
  cli->add_option("--dataset", o.dataset, "processed Cleveland CSV");
  cli->add_option("--alpha", o.alpha, "EBC weight");
  cli->add_option("--beta", o.beta, "anchor weight");
  cli->add_option("--margin", o.margin, "EBC margin");
  cli->add_option("--chains", o.chains, "discovery chains per paradigm");
  cli->add_flag("--skip-rules", o.skip_rules, "train the Classic JEPA baseline only");
  cli->add_flag("--export-embeddings", o.export_embeddings, "write embeddings_<model>.csv");

  auto* mine = app.add_subcommand("mine", "FP-Growth rule mining on the training split");
  common(mine);
  mine->add_option("--dataset", o.dataset, "processed Cleveland CSV");

  auto* disc = app.add_subcommand("discover", "Langevin rule discovery from a checkpoint");
  common(disc);
  disc->add_option("--checkpoint", o.checkpoint, "model_<name>.ckpt written by synthetic or clinical");
  disc->add_option("--mode", o.mode, "joint | forward | abductive | marginal");
  disc->add_option("--chains", o.chains, "number of chains (marginal: proposals)");
  disc->add_option("--condition", o.condition, "antecedent tokens (forward), e.g. age_group=Senior");
  disc->add_option("--outcome", o.outcome, "consequent tokens (abductive), e.g. target_risk=1.0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (syn->parsed()) return guarded([&] { return cmd_synthetic(o); });
  if (cli->parsed()) return guarded([&] { return cmd_clinical(o); });
  if (mine->parsed()) return guarded([&] { return cmd_mine(o); });
  return guarded([&] { return cmd_discover(o); });
}
