// hcot: train, compare and ablate hierarchical complement objective training.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid configuration,
// 3 missing or malformed data, 4 non-finite loss or parameters.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcot/checkpoint.hpp"
#include "hcot/experiment.hpp"
#include "hcot/metrics.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigInvalid = 2,
  kDataMissing = 3,
  kNumerical = 4,
};

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string objective;
  std::string schedule;
  std::string hierarchy;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON) or a previous run's manifest.json");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--objective", f.objective, "Training objective")
      ->check(CLI::IsMember({"xe", "cot", "hcot"}));
  cmd->add_option("--schedule", f.schedule, "Optimization schedule")
      ->check(CLI::IsMember({"direct", "alternating"}));
  cmd->add_option("--hierarchy", f.hierarchy,
                  "Hierarchy file or builtin:flat|identity|native|contiguous:<N>");
  cmd->add_flag("--force", f.force, "Allow writing into a non-empty output directory");
}

hcot::ExperimentConfig build_config(const CommonFlags& f) {
  hcot::ExperimentConfig cfg =
      f.config.empty() ? hcot::ExperimentConfig{} : hcot::load_experiment_config(f.config);
  if (!f.out.empty()) cfg.output = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.objective.empty()) cfg.train.objective = *hcot::parse_objective(f.objective);
  if (!f.schedule.empty()) cfg.train.schedule = *hcot::parse_schedule(f.schedule);
  if (!f.hierarchy.empty()) cfg.hierarchy = f.hierarchy;
  cfg.force = f.force;
  return cfg;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kOk;
  } catch (const hcot::ConfigError& e) {
    std::cerr << "hcot: config error: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const hcot::DataError& e) {
    std::cerr << "hcot: data error: " << e.what() << '\n';
    return kDataMissing;
  } catch (const hcot::NumericalError& e) {
    std::cerr << "hcot: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "hcot: " << e.what() << '\n';
    return kFailure;
  }
}

void print_metrics(const hcot::MetricsRecord& m) {
  std::cout << hcot::metrics_csv_header() << '\n';
  hcot::write_metrics_row(std::cout, m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical complement objective training"};
  app.require_subcommand(1);

  CommonFlags train_flags, compare_flags, ablate_flags, eval_flags, export_flags;
  auto* train = app.add_subcommand("train", "Train one model and write metrics, profile, checkpoint");
  add_common(train, train_flags);

  auto* compare = app.add_subcommand("compare", "Train xe, cot and hcot with identical seeds");
  add_common(compare, compare_flags);

  std::string granularities = "1";
  auto* ablate = app.add_subcommand("ablate-nc", "Sweep the number of coarse classes");
  add_common(ablate, ablate_flags);
  ablate->add_option("--granularities", granularities,
                     "Comma list of coarse-class counts (contiguous grouping) or hierarchy files")
      ->required();

  std::string eval_checkpoint;
  std::string eval_profile;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  add_common(eval, eval_flags);
  eval->add_option("--checkpoint", eval_checkpoint, "Checkpoint file")->required();
  eval->add_option("--profile", eval_profile, "Also write the probability profile CSV here");

  std::string export_checkpoint;
  std::string export_split = "test";
  auto* export_cmd = app.add_subcommand("export-embeddings", "Write penultimate-layer activations as CSV");
  add_common(export_cmd, export_flags);
  export_cmd->add_option("--checkpoint", export_checkpoint, "Checkpoint file")->required();
  export_cmd->add_option("--split", export_split, "Dataset split")->check(CLI::IsMember({"train", "test"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }

  if (train->parsed()) {
    return guarded([&] {
      const auto cfg = build_config(train_flags);
      const auto result = hcot::run_experiment(cfg);
      const auto& m = result.metrics.back();
      std::cout << "fine_error=" << hcot::format_double(m.fine_error)
                << " coarse_error=" << hcot::format_double(m.coarse_error)
                << " staircase_gap=" << hcot::format_double(result.profile.staircase_gap())
                << " -> " << cfg.output.string() << '\n';
    });
  }
  if (compare->parsed()) {
    return guarded([&] {
      const auto cfg = build_config(compare_flags);
      hcot::run_compare(cfg);
      std::ifstream table(cfg.output / "compare.csv");
      std::cout << table.rdbuf();
    });
  }
  if (ablate->parsed()) {
    return guarded([&] {
      const auto cfg = build_config(ablate_flags);
      hcot::run_ablation_nc(cfg, split_list(granularities));
      std::ifstream table(cfg.output / "ablation_nc.csv");
      std::cout << table.rdbuf();
    });
  }
  if (eval->parsed()) {
    return guarded([&] {
      auto cfg = build_config(eval_flags);
      const auto ckpt = hcot::load_checkpoint(eval_checkpoint);
      hcot::ProbabilityProfile profile;
      print_metrics(hcot::evaluate_checkpoint(cfg, ckpt, &profile));
      if (!eval_profile.empty()) {
        std::ofstream out(eval_profile, std::ios::binary | std::ios::trunc);
        if (!out) throw hcot::ConfigError("cannot write " + eval_profile);
        hcot::write_profile_csv(out, profile);
      }
    });
  }
  if (export_cmd->parsed()) {
    return guarded([&] {
      auto cfg = build_config(export_flags);
      if (cfg.output.empty()) throw hcot::ConfigError("export-embeddings needs --out <file.csv>");
      const auto ckpt = hcot::load_checkpoint(export_checkpoint);
      const auto data = hcot::prepare_data(cfg);
      const auto eval_ref = cfg.eval_hierarchy.value_or("builtin:native");
      const auto h = hcot::resolve_hierarchy(eval_ref, data);
      const auto& split = export_split == "train" ? data.train : data.test;
      std::error_code ec;
      if (std::filesystem::exists(cfg.output, ec) && !cfg.force) {
        throw hcot::ConfigError("'" + cfg.output.string() + "' exists; pass --force to overwrite");
      }
      std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
      if (!out) throw hcot::ConfigError("cannot write " + cfg.output.string());
      hcot::export_embeddings(out, ckpt.network, split, h);
    });
  }
  return kFailure;
}
