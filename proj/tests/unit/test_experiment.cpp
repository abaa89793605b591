#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hcot/experiment.hpp"
#include "temp_dir.hpp"

using namespace hcot;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig tiny_config(const std::filesystem::path& out) {
  ExperimentConfig cfg = parse_experiment_config(R"({
    "dataset": {"kind": "synthetic", "num_coarse": 3, "fines_per_coarse": 3, "dim": 8,
                "samples_per_fine": 30, "test_samples_per_fine": 10},
    "hierarchy": "builtin:native",
    "network": {"hidden": 12},
    "train": {"objective": "hcot", "schedule": "direct", "epochs": 2, "batch_size": 32,
              "lr": 0.05, "momentum": 0.9, "weight_decay": 0.0001, "lr_milestones": [1]},
    "seed": 4
  })");
  cfg.output = out;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = tiny_config("x");
  CHECK(cfg.dataset.synthetic.dim == 8);
  CHECK(cfg.train.lr_milestones == std::vector<Index>{1});
  CHECK(cfg.hierarchy == std::optional<std::string>("builtin:native"));
  CHECK(parse_experiment_config(experiment_config_json(cfg)).train.epochs == 2);
  CHECK(config_hash(parse_experiment_config(experiment_config_json(cfg))) == config_hash(cfg));

  CHECK_THROWS_AS(parse_experiment_config("{\"trian\": {}}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"train\": {\"lr\": \"fast\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"train\": {\"objective\": \"focal\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("not json"), ConfigError);

  auto no_h = cfg;
  no_h.hierarchy.reset();
  try {
    no_h.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'hierarchy'") != std::string::npos);
  }
  no_h.train.objective = ObjectiveKind::cot;
  CHECK_NOTHROW(no_h.validate());
}

TEST_CASE("seed fan-out is fixed") {
  const auto a = derive_seeds(1);
  CHECK(a.data != a.init);
  CHECK(a.init != a.shuffle);
  CHECK(derive_seeds(1).data == a.data);
  CHECK(derive_seeds(2).data != a.data);
}

TEST_CASE("run_experiment writes parseable, reproducible artifacts") {
  test_support::TempDir tmp;
  const auto cfg = tiny_config(tmp.path() / "run1");
  const auto result = run_experiment(cfg);
  CHECK(result.metrics.size() == 2);

  for (const char* f : {"metrics.csv", "profile.csv", "model.ckpt", "manifest.json"}) {
    CHECK(std::filesystem::exists(cfg.output / f));
  }
  const auto metrics = slurp(cfg.output / "metrics.csv");
  CHECK(metrics.rfind(metrics_csv_header() + "\n0,", 0) == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 3);
  CHECK(slurp(cfg.output / "profile.csv").rfind("rank_group,rank,mean_probability\ng,0,", 0) == 0);
  const auto ck = load_checkpoint(cfg.output / "model.ckpt");
  CHECK(ck.epoch == 2);
  CHECK(std::equal(ck.network.parameters().begin(), ck.network.parameters().end(),
                   result.network.parameters().begin()));

  SUBCASE("same config reproduces metrics.csv byte for byte") {
    auto again = cfg;
    again.output = tmp.path() / "run2";
    run_experiment(again);
    CHECK(slurp(again.output / "metrics.csv") == metrics);
  }
  SUBCASE("manifest re-runs the experiment") {
    auto from_manifest = load_experiment_config(cfg.output / "manifest.json");
    CHECK(config_hash(from_manifest) == config_hash(cfg));
    from_manifest.output = tmp.path() / "run3";
    run_experiment(from_manifest);
    CHECK(slurp(from_manifest.output / "metrics.csv") == metrics);
  }
  SUBCASE("refuses a non-empty output directory without force") {
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    auto forced = cfg;
    forced.force = true;
    CHECK_NOTHROW(run_experiment(forced));
  }
  SUBCASE("checkpoint evaluation reproduces the last metrics row") {
    const auto m = evaluate_checkpoint(cfg, ck);
    CHECK(m.fine_error == result.metrics.back().fine_error);
    CHECK(m.coarse_error == result.metrics.back().coarse_error);
  }
}

TEST_CASE("missing references are config errors") {
  test_support::TempDir tmp;
  auto cfg = tiny_config(tmp.path() / "run");
  cfg.hierarchy = (tmp.path() / "nope.hierarchy").string();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.hierarchy = "builtin:bogus";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.hierarchy = std::string(HCOT_SOURCE_DIR) + "/data/cifar100.hierarchy";  // 100 classes vs 9
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("missing CIFAR data is a data error") {
  test_support::TempDir tmp;
  auto cfg = tiny_config(tmp.path() / "run");
  cfg.dataset.kind = DatasetKind::cifar100;
  cfg.dataset.cifar_path = tmp.path() / "absent";
  CHECK_THROWS_AS(run_experiment(cfg), DataError);
}

TEST_CASE("run_compare and run_ablation_nc tables") {
  test_support::TempDir tmp;
  auto cfg = tiny_config(tmp.path() / "cmp");
  const auto rows = run_compare(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].objective == ObjectiveKind::xe);
  CHECK(rows[1].objective == ObjectiveKind::cot);
  CHECK(rows[2].objective == ObjectiveKind::hcot);
  CHECK(!rows[0].complement_in_updates);
  CHECK(rows[0].final_metrics.hce > 0.0);
  CHECK(rows[2].complement_in_updates);
  const auto table = slurp(cfg.output / "compare.csv");
  CHECK(table.rfind(compare_csv_header() + "\nxe,", 0) == 0);
  CHECK(table.find("\ncot,") != std::string::npos);
  CHECK(table.find("\nhcot,") != std::string::npos);
  CHECK(std::filesystem::exists(cfg.output / "hcot" / "metrics.csv"));

  auto abl = tiny_config(tmp.path() / "abl");
  const auto ab = run_ablation_nc(abl, {"1"});
  REQUIRE(ab.size() == 2);
  CHECK(ab[0].label == "cot");
  CHECK(ab[1].num_coarse == 1);
  CHECK(ab[1].param_digest == ab[0].param_digest);
  CHECK(slurp(abl.output / "ablation_nc.csv").rfind(ablation_csv_header() + "\ncot,", 0) == 0);
  CHECK_THROWS_AS(run_ablation_nc(tiny_config(tmp.path() / "abl2"), {"2"}), ConfigError);
}

#ifdef HCOT_CLI_PATH
TEST_CASE("CLI exit codes") {
  test_support::TempDir tmp;
  const auto cfg_path = tmp.path() / "cfg.json";
  auto cfg = tiny_config("");
  cfg.hierarchy.reset();
  {
    std::ofstream out(cfg_path);
    out << experiment_config_json(cfg);
  }
  auto run = [](const std::string& args) {
    const std::string cmd = std::string(HCOT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  const std::string base = "--config " + cfg_path.string() + " --out " + (tmp.path() / "o").string();
  CHECK(run("train " + base + " --objective hcot") == 2);
  CHECK(run("train " + base + " --objective hcot --hierarchy builtin:native") == 0);
  CHECK(run("train " + base + " --objective hcot --hierarchy builtin:native") == 2);  // not empty
  CHECK(run("train " + base + " --objective hcot --hierarchy builtin:flat --force") == 0);
  CHECK(run("eval " + base + " --checkpoint " + (tmp.path() / "o" / "model.ckpt").string()) == 0);
  CHECK(run("export-embeddings --config " + cfg_path.string() + " --out " + (tmp.path() / "e.csv").string() +
            " --checkpoint " + (tmp.path() / "o" / "model.ckpt").string()) == 0);
  CHECK(std::filesystem::exists(tmp.path() / "e.csv"));

  auto cifar = cfg;
  cifar.dataset.kind = DatasetKind::cifar100;
  cifar.dataset.cifar_path = tmp.path() / "no-such-dir";
  const auto cifar_path = tmp.path() / "cifar.json";
  {
    std::ofstream out(cifar_path);
    out << experiment_config_json(cifar);
  }
  CHECK(run("train --config " + cifar_path.string() + " --out " + (tmp.path() / "c").string() +
            " --objective xe") == 3);

  auto blowup = cfg;
  blowup.train.lr = 1e12;
  blowup.train.momentum = 0.0;
  const auto blow_path = tmp.path() / "blow.json";
  {
    std::ofstream out(blow_path);
    out << experiment_config_json(blowup);
  }
  CHECK(run("train --config " + blow_path.string() + " --out " + (tmp.path() / "b").string() +
            " --objective cot") == 4);
  CHECK(run("bogus-subcommand") == 2);
}
#endif

TEST_CASE("XE linear probe separates the default synthetic task") {
  ExperimentConfig cfg = parse_experiment_config(R"({
    "dataset": {"kind": "synthetic", "num_coarse": 3, "fines_per_coarse": 3, "dim": 16,
                "samples_per_fine": 200, "coarse_spread": 10, "fine_spread": 2, "noise_sigma": 1},
    "network": {"layers": "dense:16:9"},
    "train": {"objective": "xe", "epochs": 30, "batch_size": 64, "lr": 0.005,
              "momentum": 0.9, "weight_decay": 0.0001, "lr_milestones": [20]},
    "seed": 1
  })");
  const auto data = prepare_data(cfg);
  const auto result = train_experiment(cfg, data);
  CHECK(result.metrics.back().fine_error <= 0.05);
}

TEST_CASE("ablation: the native granularity has the widest staircase gap") {
  test_support::TempDir tmp;
  ExperimentConfig cfg = parse_experiment_config(R"({
    "dataset": {"kind": "synthetic", "num_coarse": 3, "fines_per_coarse": 3, "dim": 16,
                "samples_per_fine": 600, "test_samples_per_fine": 200},
    "hierarchy": "builtin:native",
    "network": {"hidden": 32},
    "train": {"epochs": 60, "batch_size": 64, "lr": 0.005, "momentum": 0.9,
              "weight_decay": 0.0001, "lr_milestones": [30, 45]},
    "seed": 1
  })");
  cfg.output = tmp.path();
  const auto rows = run_ablation_nc(cfg, {"1", "3", "9"});
  REQUIRE(rows.size() == 4);
  double gap[10] = {};
  for (const auto& r : rows) {
    if (r.label != "cot") gap[r.num_coarse] = r.staircase_gap;
  }
  CHECK(gap[3] > gap[1]);
  CHECK(gap[3] > gap[9]);
}
