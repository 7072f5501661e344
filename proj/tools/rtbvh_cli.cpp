// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end.
//
//   rtbvh run        --scene S [--strategy X] [config flags]   one strategy, CSV/JSON row
//   rtbvh compare    --scene S [--strategies a,b,...]          first strategy is the baseline
//   rtbvh sweep      --scene S [--levels lo:hi]                one comparison per level
//   rtbvh dump-tree  --scene S [--strategy X]                  one line per node
//   rtbvh dump-paths --scene S [--strategy X]                  one line per captured path
//   rtbvh synth      KIND [--seed N] [--budget N]              write a synthetic mesh
//
// S is a mesh file or synth:KIND:SEED:BUDGET. Configuration comes from
// --config (key = value or JSON), overridden by per-key flags such as
// --alpha 0.4 or --tx 1,2,3. For synthetic scenes tx and rx default to
// positions that suit the layout.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtbvh/bench.hpp"

namespace {

using namespace rtbvh;

const char* const kConfigKeys[] = {"tx",   "rx",     "alpha", "leaf_threshold", "tessellation_level",
                                   "max_reflections",   "strategy", "frequency_ghz", "seed", "bins",
                                   "t_i",  "t_trav", "normalize_distance", "path_length_limit"};

struct SceneSpec {
  Scene scene;
  std::optional<SceneKind> synth_kind;
};

SceneSpec load_scene_spec(const std::string& spec) {
  if (spec.rfind("synth:", 0) != 0) return {load_mesh_file(spec), std::nullopt};
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 4) throw std::invalid_argument("scene spec must be synth:KIND:SEED:BUDGET, got '" + spec + "'");
  long long seed = 0, budget = 0;
  if (!detail::parse_long(parts[2], seed) || seed < 0)
    throw std::invalid_argument("scene spec: bad seed '" + parts[2] + "'");
  if (!detail::parse_long(parts[3], budget) || budget <= 0)
    throw std::invalid_argument("scene spec: bad facet budget '" + parts[3] + "'");
  const SceneKind kind = parse_scene_kind(parts[1]);
  return {synth_scene(kind, static_cast<std::uint64_t>(seed), static_cast<std::size_t>(budget)), kind};
}

std::vector<Accelerator> parse_strategy_list(const std::string& text) {
  std::vector<Accelerator> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!detail::trim(item).empty()) out.push_back(parse_accelerator(detail::trim(item)));
  if (out.empty()) throw ConfigError("strategies", "empty list");
  return out;
}

/// Options shared by every scene-consuming subcommand.
struct Common {
  std::string scene;
  std::string config_path;
  std::string output;
  std::string format = "csv";
  bool refine = false;
  int repeats = 1;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App& cmd, bool with_format) {
    cmd.add_option("--scene", scene, "Mesh file or synth:KIND:SEED:BUDGET")->required();
    cmd.add_option("--config", config_path, "Configuration file (key = value or JSON)");
    cmd.add_option("-o,--output", output, "Write to this file instead of stdout");
    cmd.add_flag("--refine", refine, "Replace captured paths by exact image-method paths");
    if (with_format) {
      cmd.add_option("--out", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
      cmd.add_option("--repeats", repeats, "Timed repetitions (median is reported)")->check(CLI::PositiveNumber);
    }
    for (const char* key : kConfigKeys) {
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      std::string names = std::string("--") + key;
      if (dashed != key) names += ",--" + dashed;
      cmd.add_option_function<std::string>(
          names, [this, k = std::string(key)](const std::string& v) { overrides[k] = v; },
          std::string("Override config key ") + key);
    }
  }

  RunConfig resolve(const SceneSpec& spec) const {
    ConfigEntries entries;
    if (!config_path.empty()) entries = parse_config_entries(read_config_file(config_path));
    for (const auto& [key, value] : overrides) {
      auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
      if (it != entries.end())
        it->second = value;
      else
        entries.emplace_back(key, value);
    }
    if (spec.synth_kind) {
      auto has = [&](const char* k) {
        return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.first == k; });
      };
      if (!has("tx")) entries.emplace_back("tx", format_vec(synth_default_tx(*spec.synth_kind), ','));
      if (!has("rx")) entries.emplace_back("rx", format_vec(synth_default_rx(*spec.synth_kind), ','));
    }
    return config_from_entries(entries);
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_reports(const std::vector<ComparisonReport>& reports, const std::string& format, std::ostream& os) {
  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    os << j.dump(2) << '\n';
  } else {
    write_csv(reports, os);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BVH-accelerated shooting-and-bouncing-ray tracer benchmark"};
  app.require_subcommand(1);

  Common run_opts, cmp_opts, sweep_opts, tree_opts, paths_opts;
  std::string cmp_strategies = "brute,median,sah,hybrid";
  std::string sweep_strategies = "brute,median,sah,hybrid";
  std::string levels = "0:5";

  auto* run_cmd = app.add_subcommand("run", "Trace with one strategy and report counters and timings");
  run_opts.attach(*run_cmd, true);

  auto* cmp_cmd = app.add_subcommand("compare", "Run several strategies on the same inputs");
  cmp_opts.repeats = 3;
  cmp_opts.attach(*cmp_cmd, true);
  cmp_cmd->add_option("--strategies", cmp_strategies, "Comma-separated; the first is the baseline");

  auto* sweep_cmd = app.add_subcommand("sweep", "Compare strategies over a range of tessellation levels");
  sweep_opts.repeats = 3;
  sweep_opts.attach(*sweep_cmd, true);
  sweep_cmd->add_option("--strategies", sweep_strategies, "Comma-separated; the first is the baseline");
  sweep_cmd->add_option("--levels", levels, "Tessellation level range lo:hi");

  auto* tree_cmd = app.add_subcommand("dump-tree", "Build the tree and print one line per node");
  tree_opts.attach(*tree_cmd, false);

  auto* paths_cmd = app.add_subcommand("dump-paths", "Trace and print the captured paths");
  paths_opts.attach(*paths_cmd, false);

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene as a mesh file");
  std::string synth_kind;
  std::uint64_t synth_seed = 0;
  std::size_t synth_budget = 5000;
  std::string synth_output;
  synth_cmd->add_option("kind", synth_kind, "random-boxes | two-clusters | corridor | skewed-city")->required();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");
  synth_cmd->add_option("--budget", synth_budget, "Facet budget")->check(CLI::PositiveNumber);
  synth_cmd->add_option("-o,--output", synth_output, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth_cmd) {
      const Scene s = synth_scene(parse_scene_kind(synth_kind), synth_seed, synth_budget);
      Output out(synth_output);
      write_mesh(s, out.stream());
      out.finish();
      return 0;
    }

    if (*run_cmd) {
      const SceneSpec spec = load_scene_spec(run_opts.scene);
      const RunConfig rc = run_opts.resolve(spec);
      ComparisonReport rep;
      rep.level = rc.tessellation_level;
      rep.ray_count = launch_count(rc.tessellation_level);
      rep.baseline = rc.strategy;
      StrategyReport e;
      e.result = run(spec.scene, rc, rc.strategy, {run_opts.repeats, run_opts.refine});
      e.diff.common = e.result.paths.size();
      rep.entries.push_back(std::move(e));
      Output out(run_opts.output);
      write_reports({rep}, run_opts.format, out.stream());
      out.finish();
      return 0;
    }

    if (*cmp_cmd) {
      const SceneSpec spec = load_scene_spec(cmp_opts.scene);
      const RunConfig rc = cmp_opts.resolve(spec);
      const auto strategies = parse_strategy_list(cmp_strategies);
      const ComparisonReport rep = compare(spec.scene, rc, strategies, {cmp_opts.repeats, cmp_opts.refine});
      Output out(cmp_opts.output);
      write_reports({rep}, cmp_opts.format, out.stream());
      out.finish();
      return 0;
    }

    if (*sweep_cmd) {
      const SceneSpec spec = load_scene_spec(sweep_opts.scene);
      const RunConfig rc = sweep_opts.resolve(spec);
      const auto strategies = parse_strategy_list(sweep_strategies);
      const auto colon = levels.find(':');
      long long lo = 0, hi = 0;
      if (colon == std::string::npos || !detail::parse_long(levels.substr(0, colon), lo) ||
          !detail::parse_long(levels.substr(colon + 1), hi))
        throw ConfigError("levels", "expected lo:hi, got '" + levels + "'");
      const auto rows = sweep_rays(spec.scene, rc, static_cast<int>(lo), static_cast<int>(hi), strategies,
                                   {sweep_opts.repeats, sweep_opts.refine});
      Output out(sweep_opts.output);
      write_reports(rows, sweep_opts.format, out.stream());
      out.finish();
      return 0;
    }

    if (*tree_cmd) {
      const SceneSpec spec = load_scene_spec(tree_opts.scene);
      const RunConfig rc = tree_opts.resolve(spec);
      const BvhTree tree = build(spec.scene.facets, build_config(rc, strategy_of(rc.strategy)));
      Output out(tree_opts.output);
      dump_tree(tree, out.stream());
      out.finish();
      return 0;
    }

    if (*paths_cmd) {
      const SceneSpec spec = load_scene_spec(paths_opts.scene);
      const RunConfig rc = paths_opts.resolve(spec);
      const RunResult r = run(spec.scene, rc, rc.strategy, {1, paths_opts.refine});
      Output out(paths_opts.output);
      dump_paths(r.paths, out.stream());
      out.finish();
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "rtbvh: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rtbvh: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
