#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kDataset = fs::path(RIJEPA_DATA_DIR) / "processed.cleveland.data";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rijepa_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + std::string(RIJEPA_CLI) + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void save(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(); }

const json kSmallSynthetic = {{"epochs", 3},    {"n_data", 40},         {"n_rules", 10},
                              {"n_negatives", 20}, {"n_test", 10}, {"grid_resolution", 5}};
const json kSmallClinical = {{"epochs", 1}, {"discovery_chains", 2}, {"langevin_iterations", 3}};

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, HelpAndUnknownFlags) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("synthetic --no-such-flag"), 2);
  EXPECT_EQ(run("teleport"), 2);
}

TEST(Cli, SyntheticWritesSnapshotThatReloads) {
  const auto dir = scratch("syn");
  save(dir / "cfg.json", kSmallSynthetic);
  ASSERT_EQ(run("synthetic --config " + q(dir / "cfg.json") + " --beta 0.5 --out " + q(dir / "a")), 0);
  for (const char* f : {"metrics.json", "energy_table.csv", "model_rijepa.ckpt", "resolved_config.json", "run.json"})
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  const json resolved = load(dir / "a" / "resolved_config.json");
  EXPECT_EQ(resolved["beta"], 0.5);
  EXPECT_EQ(resolved["epochs"], 3);

  // The snapshot reproduces the run.
  ASSERT_EQ(run("synthetic --config " + q(dir / "a" / "resolved_config.json") + " --out " + q(dir / "b")), 0);
  EXPECT_EQ(load(dir / "a" / "metrics.json"), load(dir / "b" / "metrics.json"));
}

TEST(Cli, SeedPrecedence) {
  const auto dir = scratch("seed");
  json cfg = kSmallSynthetic;
  save(dir / "plain.json", cfg);
  cfg["seed"] = 7;
  save(dir / "seeded.json", cfg);

  ASSERT_EQ(run("synthetic --config " + q(dir / "plain.json") + " --out " + q(dir / "default")), 0);
  EXPECT_EQ(load(dir / "default" / "resolved_config.json")["seed"], 111);
  ASSERT_EQ(run("synthetic --config " + q(dir / "plain.json") + " --out " + q(dir / "env"), "RIJEPA_SEED=42"), 0);
  EXPECT_EQ(load(dir / "env" / "resolved_config.json")["seed"], 42);
  ASSERT_EQ(run("synthetic --config " + q(dir / "seeded.json") + " --out " + q(dir / "file"), "RIJEPA_SEED=42"), 0);
  EXPECT_EQ(load(dir / "file" / "resolved_config.json")["seed"], 7);
  ASSERT_EQ(run("synthetic --config " + q(dir / "seeded.json") + " --seed 9 --out " + q(dir / "flag"),
                "RIJEPA_SEED=42"),
            0);
  EXPECT_EQ(load(dir / "flag" / "resolved_config.json")["seed"], 9);
  EXPECT_EQ(run("synthetic --config " + q(dir / "plain.json") + " --out " + q(dir / "bad"), "RIJEPA_SEED=x1"), 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch("cfg");
  save(dir / "unknown.json", {{"epochs", 1}, {"no_such_key", 1}});
  save(dir / "wrongtype.json", {{"epochs", "many"}});
  save(dir / "invalid.json", {{"epochs", 0}});
  std::ofstream(dir / "broken.json") << "{ not json";
  for (const char* f : {"unknown.json", "wrongtype.json", "invalid.json", "broken.json", "missing.json"})
    EXPECT_EQ(run("synthetic --config " + q(dir / f) + " --out " + q(dir / "o")), 2) << f;
}

TEST(Cli, DatasetErrorsExitTwo) {
  const auto dir = scratch("data");
  EXPECT_EQ(run("clinical --out " + q(dir / "o")), 2);
  EXPECT_EQ(run("clinical --dataset " + q(dir / "absent.csv") + " --out " + q(dir / "o")), 2);
  std::ofstream(dir / "bad.csv") << "63,1,1,145\n";
  EXPECT_EQ(run("mine --dataset " + q(dir / "bad.csv") + " --out " + q(dir / "o")), 2);
}

TEST(Cli, DivergenceExitsThree) {
  const auto dir = scratch("nan");
  json cfg = kSmallSynthetic;
  cfg["learning_rate"] = 1e300;
  save(dir / "cfg.json", cfg);
  EXPECT_EQ(run("synthetic --config " + q(dir / "cfg.json") + " --out " + q(dir / "o")), 3);
}

TEST(Cli, MineMatchesClinicalRules) {
  const auto dir = scratch("mine");
  save(dir / "cfg.json", kSmallClinical);
  ASSERT_EQ(run("mine --dataset " + q(kDataset) + " --config " + q(dir / "cfg.json") + " --out " + q(dir / "m")), 0);
  ASSERT_EQ(run("clinical --dataset " + q(kDataset) + " --config " + q(dir / "cfg.json") + " --out " + q(dir / "c")),
            0);
  EXPECT_EQ(load(dir / "m" / "rules.json"), load(dir / "c" / "rules.json"));
  EXPECT_TRUE(fs::exists(dir / "m" / "transactions.csv"));
}

TEST(Cli, ClinicalThenDiscover) {
  const auto dir = scratch("disc");
  save(dir / "cfg.json", kSmallClinical);
  ASSERT_EQ(run("clinical --dataset " + q(kDataset) + " --config " + q(dir / "cfg.json") +
                " --export-embeddings --out " + q(dir / "c")),
            0);
  EXPECT_TRUE(fs::exists(dir / "c" / "embeddings_rijepa.csv"));
  EXPECT_TRUE(fs::exists(dir / "c" / "discovery_marginal.json"));
  const json metrics = load(dir / "c" / "metrics.json");
  EXPECT_TRUE(metrics["zero_shot"]["classic_jepa"].is_null());

  const auto ckpt = q(dir / "c" / "model_rijepa.ckpt");
  ASSERT_EQ(run("discover --checkpoint " + ckpt + " --mode forward --condition age_group=Senior --chains 3 --out " +
                q(dir / "f")),
            0);
  const json report = load(dir / "f" / "discovery_forward.json");
  EXPECT_NE(report.dump().find("age_group=Senior"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "f" / "discovery_forward_energy.csv"));

  EXPECT_EQ(run("discover --checkpoint " + ckpt + " --mode sideways --out " + q(dir / "x")), 2);
  EXPECT_EQ(run("discover --checkpoint " + ckpt + " --mode forward --condition nope=1 --out " + q(dir / "x")), 2);
  EXPECT_EQ(run("discover --checkpoint " + q(dir / "none.ckpt") + " --out " + q(dir / "x")), 2);
  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  EXPECT_EQ(run("discover --checkpoint " + q(dir / "junk.ckpt") + " --out " + q(dir / "x")), 2);
}

TEST(Cli, DiscoverOnSyntheticCheckpoint) {
  const auto dir = scratch("syndisc");
  save(dir / "cfg.json", kSmallSynthetic);
  ASSERT_EQ(run("synthetic --config " + q(dir / "cfg.json") + " --out " + q(dir / "s")), 0);
  ASSERT_EQ(run("discover --checkpoint " + q(dir / "s" / "model_rijepa.ckpt") +
                " --mode abductive --outcome 1,1,1 --chains 2 --out " + q(dir / "d")),
            0);
  EXPECT_TRUE(fs::exists(dir / "d" / "discovery_abductive.json"));
}
