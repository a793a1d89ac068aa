#include "coadapt/analysis.hpp"
#include "coadapt/coadapt.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

using namespace coadapt;

RunConfig build_config(const std::string& config_path,
                       const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    kv = parse_key_values(ss.str());
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--set expects key=value, got '" + ov + "'");
    }
    std::string key = ov.substr(0, eq);
    std::string value = ov.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    strip(key);
    strip(value);
    kv[key] = value;
  }
  return config_from_map(kv);
}

int cmd_run(const RunConfig& cfg) {
  for (int k = 0; k < cfg.n_seeds; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    const std::string dir = cfg.out_dir + "/seed" + std::to_string(seed);
    std::cout << "run: env=" << cfg.env_id << " mode=" << to_string(cfg.mode)
              << " seed=" << seed << " -> " << dir << std::endl;
    RunOutput out = run_coadaptation(cfg, seed, dir);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : out.records) best = std::max(best, r.best_return);
    std::cout << "  designs=" << out.records.size()
              << " episodes=" << out.episodes_executed
              << " selection_rollouts=" << out.selection_rollouts
              << " best_return=" << best << std::endl;
  }
  return 0;
}

int cmd_resume(const std::string& run_dir) {
  const std::string ckpt_path = run_dir + "/checkpoint.bin";
  CheckpointData ckpt = load_checkpoint(ckpt_path);
  RunConfig cfg = config_from_map(parse_key_values(ckpt.config_text));
  std::cout << "resume: " << run_dir << " (completed "
            << ckpt.completed_designs << "/" << cfg.schedule.max_designs
            << " designs)" << std::endl;
  if (ckpt.completed_designs >= cfg.schedule.max_designs) {
    std::cout << "  nothing to do" << std::endl;
    return 0;
  }
  RunOutput out = run_coadaptation(cfg, ckpt.root_seed, run_dir, &ckpt);
  std::cout << "  finished; episodes=" << out.episodes_executed
            << " selection_rollouts=" << out.selection_rollouts << std::endl;
  return 0;
}

int cmd_landscape(const std::string& ckpt_path, const std::string& out_path,
                  int dim_a, int dim_b, int resolution) {
  CheckpointData ckpt = load_checkpoint(ckpt_path);
  RunConfig cfg = config_from_map(parse_key_values(ckpt.config_text));
  const auto env = make_environment(cfg.env_id);
  const DesignSpace& space = env->spec().design_space;
  if (ckpt.start_state_sample.empty()) {
    throw std::runtime_error("checkpoint has no stored start states");
  }
  ObjectiveContext ctx;
  ctx.networks = &ckpt.agent.population;
  ctx.start_batch = ckpt.start_state_sample;
  Objective f = [&ctx](const DesignVector& d) { return q_objective(d, ctx); };
  const DesignVector base = ckpt.history.empty()
                                ? env->original_design()
                                : ckpt.history.back().design;
  const auto slice = landscape_slice(f, space, base, dim_a, dim_b, resolution);
  write_landscape_csv(out_path, slice);
  std::cout << "landscape: " << slice.points.size() << " points -> "
            << out_path << std::endl;
  return 0;
}

int cmd_pca(const std::string& ckpt_path, const std::string& out_path) {
  CheckpointData ckpt = load_checkpoint(ckpt_path);
  std::vector<DesignVector> designs;
  for (const auto& h : ckpt.history) designs.push_back(h.design);
  const auto pca = pca_fit(designs);
  write_pca_csv(out_path, pca, ckpt.history);
  std::cout << "pca: " << designs.size() << " designs, explained variance "
            << pca.explained_variance(0) << " + " << pca.explained_variance(1)
            << " of " << pca.total_variance << " -> " << out_path << std::endl;
  return 0;
}

// Each argument is mode=path1[,path2,...]; a bare path gets mode "run".
int cmd_compare(const std::vector<std::string>& group_args,
                const std::string& out_path) {
  std::vector<RunGroup> groups;
  for (const auto& arg : group_args) {
    RunGroup g;
    std::string paths = arg;
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      g.mode = arg.substr(0, eq);
      paths = arg.substr(eq + 1);
    } else {
      g.mode = "run";
    }
    std::istringstream ss(paths);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (!p.empty()) g.episode_csv_paths.push_back(p);
    }
    groups.push_back(std::move(g));
  }
  const auto rows = compare_runs(groups);
  write_compare_csv(out_path, rows);
  std::cout << "compare: " << groups.size() << " groups, " << rows.size()
            << " rows -> " << out_path << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-adaptation of design and control"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "execute co-adaptation runs");
  run->add_option("-c,--config", config_path, "config file (key = value)");
  run->add_option("--set", overrides, "override config keys (key=value)");

  std::string run_dir;
  auto* resume = app.add_subcommand("resume", "continue a checkpointed run");
  resume->add_option("run_dir", run_dir, "run directory with checkpoint.bin")
      ->required();

  std::string ckpt_path, out_path = "landscape.csv";
  int dim_a = 0, dim_b = 1, resolution = 25;
  auto* landscape =
      app.add_subcommand("landscape", "grid-evaluate the design objective");
  landscape->add_option("checkpoint", ckpt_path, "checkpoint.bin path")
      ->required();
  landscape->add_option("-o,--out", out_path, "output csv");
  landscape->add_option("--dim-a", dim_a, "first design dimension");
  landscape->add_option("--dim-b", dim_b, "second design dimension");
  landscape->add_option("-r,--resolution", resolution, "grid points per axis");

  std::string pca_ckpt, pca_out = "pca.csv";
  auto* pca = app.add_subcommand("pca", "principal components of the design history");
  pca->add_option("checkpoint", pca_ckpt, "checkpoint.bin path")->required();
  pca->add_option("-o,--out", pca_out, "output csv");

  std::vector<std::string> compare_groups;
  std::string compare_out = "compare.csv";
  auto* compare = app.add_subcommand("compare", "summarize runs side by side");
  compare
      ->add_option("groups", compare_groups,
                   "mode=episodes.csv[,episodes.csv...] per group")
      ->required();
  compare->add_option("-o,--out", compare_out, "output csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(build_config(config_path, overrides));
    if (resume->parsed()) return cmd_resume(run_dir);
    if (landscape->parsed()) {
      return cmd_landscape(ckpt_path, out_path, dim_a, dim_b, resolution);
    }
    if (pca->parsed()) return cmd_pca(pca_ckpt, pca_out);
    if (compare->parsed()) return cmd_compare(compare_groups, compare_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
