#include "hcot/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hcot/seed.hpp"

namespace hcot {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string digest_parameters(std::span<const double> params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : params) {
    const auto bits = std::bit_cast<std::uint64_t>(p);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return hex64(h);
}

// Rejects keys outside `allowed` so that typos surface as config errors.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown field '" + where + (where.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + where + "." + key + "' has the wrong type");
  }
}

std::filesystem::path resolve_cifar_root(const DatasetConfig& d) {
  if (!d.cifar_path.empty()) return d.cifar_path;
  if (const char* env = std::getenv("HCE_DATA_DIR"); env != nullptr && *env != '\0') return env;
  throw DataError("CIFAR-100 path not set: give dataset.path or set HCE_DATA_DIR");
}

bool is_builtin(const std::string& ref) { return ref.rfind("builtin:", 0) == 0; }

void check_hierarchy_ref(const std::optional<std::string>& ref, const char* field) {
  if (!ref || is_builtin(*ref)) return;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(*ref, ec)) {
    throw ConfigError(std::string("field '") + field + "': hierarchy file '" + *ref + "' does not exist");
  }
}

void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  std::error_code ec;
  if (std::filesystem::exists(dir, ec)) {
    if (!std::filesystem::is_directory(dir, ec)) {
      throw ConfigError("output '" + dir.string() + "' exists and is not a directory");
    }
    if (!std::filesystem::is_empty(dir, ec) && !force) {
      throw ConfigError("output directory '" + dir.string() +
                        "' is not empty; pass --force to overwrite");
    }
  }
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

LabelHierarchy hierarchy_from_pairs(const CifarSplit& split) {
  std::vector<Index> map(kCifarFineClasses, kCifarCoarseClasses);
  for (Index i = 0; i < split.coarse_labels.size(); ++i) {
    const Index fine = split.data.fine_labels[i];
    const Index coarse = split.coarse_labels[i];
    if (map[fine] != kCifarCoarseClasses && map[fine] != coarse) {
      throw DataError("CIFAR-100: fine class " + std::to_string(fine) +
                      " appears under two coarse classes");
    }
    map[fine] = coarse;
  }
  for (Index& c : map) {
    if (c == kCifarCoarseClasses) throw DataError("CIFAR-100: some fine class never appears");
  }
  try {
    return LabelHierarchy(std::move(map));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("CIFAR-100: ") + e.what());
  }
}

}  // namespace

// ---- configuration ---------------------------------------------------------

void ExperimentConfig::validate() const {
  train.validate();
  if (dataset.kind == DatasetKind::synthetic) {
    SyntheticSpec s = dataset.synthetic;
    s.validate();
  }
  if (train.objective == ObjectiveKind::hcot && !hierarchy) {
    throw ConfigError("missing field 'hierarchy': objective hcot requires a label hierarchy");
  }
  if (hidden == 0) throw ConfigError("field 'network.hidden' must be positive");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) doc = doc.at("config");
  check_keys(doc, {"dataset", "hierarchy", "eval_hierarchy", "network", "train", "seed", "output"}, "");

  ExperimentConfig cfg;
  if (doc.contains("dataset")) {
    const auto& d = doc.at("dataset");
    std::string kind = "synthetic";
    read_field(d, "kind", kind, "dataset");
    if (kind == "synthetic") {
      check_keys(d, {"kind", "num_coarse", "fines_per_coarse", "dim", "samples_per_fine",
                     "test_samples_per_fine", "coarse_spread", "fine_spread", "noise_sigma"},
                 "dataset");
      auto& s = cfg.dataset.synthetic;
      read_field(d, "num_coarse", s.num_coarse, "dataset");
      read_field(d, "fines_per_coarse", s.fines_per_coarse, "dataset");
      read_field(d, "dim", s.dim, "dataset");
      read_field(d, "samples_per_fine", s.samples_per_fine, "dataset");
      read_field(d, "test_samples_per_fine", s.test_samples_per_fine, "dataset");
      read_field(d, "coarse_spread", s.coarse_spread, "dataset");
      read_field(d, "fine_spread", s.fine_spread, "dataset");
      read_field(d, "noise_sigma", s.noise_sigma, "dataset");
    } else if (kind == "cifar100") {
      check_keys(d, {"kind", "path", "augment", "max_records"}, "dataset");
      cfg.dataset.kind = DatasetKind::cifar100;
      std::string path;
      read_field(d, "path", path, "dataset");
      cfg.dataset.cifar_path = path;
      read_field(d, "augment", cfg.dataset.augment, "dataset");
      read_field(d, "max_records", cfg.dataset.cifar_max_records, "dataset");
    } else {
      throw ConfigError("field 'dataset.kind' must be 'synthetic' or 'cifar100'");
    }
  }
  if (doc.contains("hierarchy") && !doc.at("hierarchy").is_null()) {
    std::string h;
    read_field(doc, "hierarchy", h, "");
    cfg.hierarchy = h;
  }
  if (doc.contains("eval_hierarchy") && !doc.at("eval_hierarchy").is_null()) {
    std::string h;
    read_field(doc, "eval_hierarchy", h, "");
    cfg.eval_hierarchy = h;
  }
  if (doc.contains("network")) {
    const auto& n = doc.at("network");
    check_keys(n, {"layers", "hidden"}, "network");
    read_field(n, "layers", cfg.layers, "network");
    read_field(n, "hidden", cfg.hidden, "network");
  }
  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    check_keys(t, {"schedule", "objective", "epochs", "batch_size", "lr", "momentum", "weight_decay",
                   "lr_milestones", "alternating_order", "complement_lr_scale", "normalize_entropy"},
               "train");
    auto& tc = cfg.train;
    std::string text;
    if (t.contains("schedule")) {
      read_field(t, "schedule", text, "train");
      const auto s = parse_schedule(text);
      if (!s) throw ConfigError("field 'train.schedule' must be direct or alternating");
      tc.schedule = *s;
    }
    if (t.contains("objective")) {
      read_field(t, "objective", text, "train");
      const auto o = parse_objective(text);
      if (!o) throw ConfigError("field 'train.objective' must be xe, cot or hcot");
      tc.objective = *o;
    }
    if (t.contains("alternating_order")) {
      read_field(t, "alternating_order", text, "train");
      const auto o = parse_alternating_order(text);
      if (!o) throw ConfigError("field 'train.alternating_order' must be complement_first or xe_first");
      tc.alternating_order = *o;
    }
    read_field(t, "epochs", tc.epochs, "train");
    read_field(t, "batch_size", tc.batch_size, "train");
    read_field(t, "lr", tc.lr, "train");
    read_field(t, "momentum", tc.momentum, "train");
    read_field(t, "weight_decay", tc.weight_decay, "train");
    read_field(t, "lr_milestones", tc.lr_milestones, "train");
    read_field(t, "complement_lr_scale", tc.complement_lr_scale, "train");
    read_field(t, "normalize_entropy", tc.entropy.normalize_by_subset_size, "train");
  }
  read_field(doc, "seed", cfg.seed, "");
  std::string output;
  read_field(doc, "output", output, "");
  cfg.output = output;
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

namespace {

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json d;
  if (cfg.dataset.kind == DatasetKind::synthetic) {
    const auto& s = cfg.dataset.synthetic;
    d = {{"kind", "synthetic"},
         {"num_coarse", s.num_coarse},
         {"fines_per_coarse", s.fines_per_coarse},
         {"dim", s.dim},
         {"samples_per_fine", s.samples_per_fine},
         {"test_samples_per_fine", s.test_samples_per_fine},
         {"coarse_spread", s.coarse_spread},
         {"fine_spread", s.fine_spread},
         {"noise_sigma", s.noise_sigma}};
  } else {
    d = {{"kind", "cifar100"},
         {"path", cfg.dataset.cifar_path.string()},
         {"augment", cfg.dataset.augment},
         {"max_records", cfg.dataset.cifar_max_records}};
  }
  const auto& t = cfg.train;
  ordered_json train = {{"schedule", to_string(t.schedule)},
                        {"objective", to_string(t.objective)},
                        {"epochs", t.epochs},
                        {"batch_size", t.batch_size},
                        {"lr", t.lr},
                        {"momentum", t.momentum},
                        {"weight_decay", t.weight_decay},
                        {"lr_milestones", t.lr_milestones},
                        {"alternating_order", to_string(t.alternating_order)},
                        {"complement_lr_scale", t.complement_lr_scale},
                        {"normalize_entropy", t.entropy.normalize_by_subset_size}};
  ordered_json out;
  out["dataset"] = d;
  out["hierarchy"] = cfg.hierarchy ? ordered_json(*cfg.hierarchy) : ordered_json(nullptr);
  out["eval_hierarchy"] = cfg.eval_hierarchy ? ordered_json(*cfg.eval_hierarchy) : ordered_json(nullptr);
  out["network"] = {{"layers", cfg.layers}, {"hidden", cfg.hidden}};
  out["train"] = train;
  out["seed"] = cfg.seed;
  out["output"] = cfg.output.string();
  return out;
}

}  // namespace

std::string experiment_config_json(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
  // The output location does not affect results.
  auto j = config_to_json(cfg);
  j.erase("output");
  return hex64(fnv1a(j.dump()));
}

DerivedSeeds derive_seeds(std::uint64_t master) {
  return {derive_seed(master, SeedStream::data), derive_seed(master, SeedStream::init),
          derive_seed(master, SeedStream::shuffle)};
}

// ---- data and hierarchies --------------------------------------------------

PreparedData prepare_data(const ExperimentConfig& cfg) {
  const auto seeds = derive_seeds(cfg.seed);
  if (cfg.dataset.kind == DatasetKind::synthetic) {
    SyntheticSpec spec = cfg.dataset.synthetic;
    spec.seed = seeds.data;
    auto syn = generate_synthetic(spec);
    return {std::move(syn.train), std::move(syn.test), spec.num_fine(), std::move(syn.hierarchy)};
  }
  const auto root = resolve_cifar_root(cfg.dataset);
  CifarOptions opts;
  opts.max_records = cfg.dataset.cifar_max_records;
  auto train = load_cifar100(root, Split::train, opts);
  auto test = load_cifar100(root, Split::test, opts);
  auto native = hierarchy_from_pairs(train);
  const auto means = channel_means(train.data);
  subtract_channel_means(train.data, means);
  subtract_channel_means(test.data, means);
  return {std::move(train.data), std::move(test.data), kCifarFineClasses, std::move(native)};
}

LabelHierarchy resolve_hierarchy(const std::string& ref, const PreparedData& data) {
  const Index k = data.num_fine;
  LabelHierarchy h = [&] {
    if (ref == "builtin:flat") return LabelHierarchy::flat(k);
    if (ref == "builtin:identity") return LabelHierarchy::identity(k);
    if (ref == "builtin:native") return data.native;
    constexpr std::string_view contiguous = "builtin:contiguous:";
    if (ref.rfind(contiguous, 0) == 0) {
      try {
        const auto n = std::stoull(ref.substr(contiguous.size()));
        return LabelHierarchy::contiguous(k, n);
      } catch (const std::exception& e) {
        throw ConfigError("hierarchy '" + ref + "': " + e.what());
      }
    }
    if (is_builtin(ref)) throw ConfigError("unknown builtin hierarchy '" + ref + "'");
    try {
      return load_hierarchy(ref);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }();
  if (h.num_fine() != k) {
    throw ConfigError("hierarchy '" + ref + "' covers " + std::to_string(h.num_fine()) +
                      " fine classes but the dataset has " + std::to_string(k));
  }
  return h;
}

std::vector<LayerSpec> network_layers(const ExperimentConfig& cfg, Index input_dim, Index num_fine) {
  if (cfg.layers.empty()) {
    return {LayerSpec::dense(input_dim, cfg.hidden), LayerSpec::relu(cfg.hidden),
            LayerSpec::dense(cfg.hidden, num_fine)};
  }
  std::vector<LayerSpec> specs;
  try {
    specs = parse_layer_specs(cfg.layers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'network.layers': ") + e.what());
  }
  if (specs.front().in != input_dim || specs.back().out != num_fine) {
    throw ConfigError("field 'network.layers' must map " + std::to_string(input_dim) + " inputs to " +
                      std::to_string(num_fine) + " logits");
  }
  return specs;
}

// ---- training --------------------------------------------------------------

namespace {

struct Hierarchies {
  LabelHierarchy train;
  LabelHierarchy eval;
};

Hierarchies resolve_all(const ExperimentConfig& cfg, const PreparedData& data) {
  // xe and cot do not use a training hierarchy; report HCE under the eval one.
  const std::string eval_ref = cfg.eval_hierarchy.value_or("builtin:native");
  auto eval = resolve_hierarchy(eval_ref, data);
  auto train = cfg.hierarchy ? resolve_hierarchy(*cfg.hierarchy, data) : eval;
  return {std::move(train), std::move(eval)};
}

MetricsRecord evaluate_network(const Network& net, const Dataset& test, const LabelHierarchy& h,
                               Index epoch, double xe, double hce, ProbabilityProfile* profile) {
  const auto fwd = net.forward(test.inputs);
  const LogitBatch batch(fwd.logits, test.fine_labels);
  if (profile != nullptr) *profile = probability_profile(batch, h);
  return evaluate_logits(epoch, batch, h, xe, hce);
}

}  // namespace

ExperimentResult train_experiment(const ExperimentConfig& cfg, const PreparedData& data) {
  cfg.validate();
  data.train.validate(data.num_fine);
  data.test.validate(data.num_fine);
  const auto hier = resolve_all(cfg, data);
  const auto seeds = derive_seeds(cfg.seed);

  TrainConfig tc = cfg.train;
  tc.seed = seeds.shuffle;
  auto net = Network::init(network_layers(cfg, data.train.dim(), data.num_fine), seeds.init);
  OptimizerState state(net);

  BatchTransform transform;
  if (cfg.dataset.kind == DatasetKind::cifar100 && cfg.dataset.augment) {
    transform = [](const Matrix& x, std::uint64_t seed) { return augment_crop_flip(x, seed); };
  }

  ExperimentResult result{{}, {}, {}, net, {}};
  for (Index epoch = 0; epoch < tc.epochs; ++epoch) {
    const EpochContext ctx{data.train, hier.train, tc, epoch, transform};
    result.last_epoch = train_epoch(net, state, ctx);
    const bool last = epoch + 1 == tc.epochs;
    auto record = evaluate_network(net, data.test, hier.eval, epoch, result.last_epoch.xe,
                                   result.last_epoch.hce, last ? &result.profile : nullptr);
    result.metrics.push_back(record);
  }
  for (double p : net.parameters()) {
    if (!std::isfinite(p)) throw NumericalError("non-finite parameter after training");
  }
  result.param_digest = digest_parameters(net.parameters());
  result.network = std::move(net);
  return result;
}

namespace {

void write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result,
                     const std::string& command) {
  const auto& dir = cfg.output;
  {
    auto out = open_output(dir / "metrics.csv");
    out << metrics_csv_header() << '\n';
    for (const auto& r : result.metrics) write_metrics_row(out, r);
  }
  {
    auto out = open_output(dir / "profile.csv");
    write_profile_csv(out, result.profile);
  }
  save_checkpoint(dir / "model.ckpt", result.network, cfg.train.epochs);

  const auto seeds = derive_seeds(cfg.seed);
  ordered_json manifest;
  manifest["tool"] = "hcot";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config_hash"] = config_hash(cfg);
  manifest["seed"] = cfg.seed;
  manifest["derived_seeds"] = {{"data", seeds.data}, {"init", seeds.init}, {"shuffle", seeds.shuffle}};
  manifest["param_digest"] = result.param_digest;
  manifest["artifacts"] = {"metrics.csv", "profile.csv", "model.ckpt"};
  manifest["config"] = config_to_json(cfg);
  auto out = open_output(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

ExperimentResult run_one(const ExperimentConfig& cfg, const PreparedData& data, const std::string& command) {
  prepare_output_dir(cfg.output, cfg.force);
  auto result = train_experiment(cfg, data);
  write_artifacts(cfg, result, command);
  return result;
}

void preflight(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.output.empty()) throw ConfigError("missing field 'output' (or pass --out)");
  check_hierarchy_ref(cfg.hierarchy, "hierarchy");
  check_hierarchy_ref(cfg.eval_hierarchy, "eval_hierarchy");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  preflight(cfg);
  const auto data = prepare_data(cfg);
  return run_one(cfg, data, "train");
}

std::string compare_csv_header() {
  return "objective,fine_error,coarse_error,top5_error,mass_g,mass_inner,mass_outer,staircase_gap,xe,"
         "hce,hce_in_updates";
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg) {
  preflight(cfg);
  if (!cfg.hierarchy) {
    throw ConfigError("missing field 'hierarchy': compare runs hcot, which requires a label hierarchy");
  }
  prepare_output_dir(cfg.output, cfg.force);
  const auto data = prepare_data(cfg);

  std::vector<CompareRow> rows;
  for (ObjectiveKind kind : {ObjectiveKind::xe, ObjectiveKind::cot, ObjectiveKind::hcot}) {
    ExperimentConfig sub = cfg;
    sub.train.objective = kind;
    sub.output = cfg.output / to_string(kind);
    sub.force = true;
    const auto r = run_one(sub, data, "compare");
    rows.push_back({kind, r.metrics.back(), r.profile.staircase_gap(), r.last_epoch.complement_in_updates});
  }

  auto out = open_output(cfg.output / "compare.csv");
  out << compare_csv_header() << '\n';
  for (const auto& row : rows) {
    const auto& m = row.final_metrics;
    out << to_string(row.objective) << ',' << format_double(m.fine_error) << ','
        << format_double(m.coarse_error) << ',' << format_double(m.top5_error) << ','
        << format_double(m.mean_mass_g) << ',' << format_double(m.mean_mass_inner) << ','
        << format_double(m.mean_mass_outer) << ',' << format_double(row.staircase_gap) << ','
        << format_double(m.xe) << ',' << format_double(m.hce) << ','
        << (row.complement_in_updates ? "true" : "false") << '\n';
  }
  return rows;
}

std::string ablation_csv_header() {
  return "label,num_coarse,fine_error,coarse_error,top5_error,staircase_gap,xe,hce,param_digest";
}

std::vector<AblationRow> run_ablation_nc(const ExperimentConfig& cfg,
                                         const std::vector<std::string>& granularities) {
  if (granularities.empty()) throw ConfigError("ablate-nc needs at least one granularity");
  ExperimentConfig base = cfg;
  base.hierarchy.reset();
  base.train.objective = ObjectiveKind::cot;
  preflight(base);

  std::vector<std::pair<std::string, std::string>> entries;  // label, hierarchy ref
  for (const auto& g : granularities) {
    const bool numeric = !g.empty() && g.find_first_not_of("0123456789") == std::string::npos;
    if (numeric) {
      entries.emplace_back(g, "builtin:contiguous:" + g);
    } else {
      check_hierarchy_ref(g, "granularities");
      entries.emplace_back(g, g);
    }
  }

  prepare_output_dir(cfg.output, cfg.force);
  const auto data = prepare_data(base);

  std::vector<AblationRow> rows;
  auto record = [&](const std::string& label, Index nc, const ExperimentResult& r) {
    rows.push_back({label, nc, r.metrics.back(), r.profile.staircase_gap(), r.param_digest});
  };

  {
    ExperimentConfig sub = base;
    sub.output = cfg.output / "cot";
    sub.force = true;
    record("cot", data.num_fine, run_one(sub, data, "ablate-nc"));
  }
  for (Index i = 0; i < entries.size(); ++i) {
    const auto& [label, ref] = entries[i];
    const auto h = resolve_hierarchy(ref, data);
    ExperimentConfig sub = base;
    sub.train.objective = ObjectiveKind::hcot;
    sub.hierarchy = ref;
    sub.output = cfg.output / ("nc_" + std::to_string(i) + "_" + std::to_string(h.num_coarse()));
    sub.force = true;
    record(label, h.num_coarse(), run_one(sub, data, "ablate-nc"));
  }

  auto out = open_output(cfg.output / "ablation_nc.csv");
  out << ablation_csv_header() << '\n';
  for (const auto& row : rows) {
    const auto& m = row.final_metrics;
    out << row.label << ',' << (row.label == "cot" ? std::string("") : std::to_string(row.num_coarse))
        << ',' << format_double(m.fine_error) << ',' << format_double(m.coarse_error) << ','
        << format_double(m.top5_error) << ',' << format_double(row.staircase_gap) << ','
        << format_double(m.xe) << ',' << format_double(m.hce) << ',' << row.param_digest << '\n';
  }
  return rows;
}

MetricsRecord evaluate_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt,
                                  ProbabilityProfile* profile) {
  const auto data = prepare_data(cfg);
  const auto hier = resolve_all(cfg, data);
  if (ckpt.network.input_dim() != data.test.dim() || ckpt.network.output_dim() != data.num_fine) {
    throw ConfigError("checkpoint shape does not match the configured dataset");
  }
  const auto fwd = ckpt.network.forward(data.test.inputs);
  const LogitBatch batch(fwd.logits, data.test.fine_labels);
  const auto xe = cross_entropy(batch).value;
  const auto hce = cfg.train.objective == ObjectiveKind::cot
                       ? complement_entropy(batch, cfg.train.entropy).value
                       : hierarchical_complement_entropy(batch, hier.train, cfg.train.entropy).value;
  return evaluate_network(ckpt.network, data.test, hier.eval, static_cast<Index>(ckpt.epoch), xe, hce,
                          profile);
}

}  // namespace hcot
