#include "coadapt/coadapt.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

namespace coadapt {

namespace {

PsoConfig exploit_pso_config(const RunConfig& cfg) {
  PsoConfig pso;
  pso.n_particles = cfg.opt_particles;
  pso.n_iterations = cfg.opt_iterations;
  return pso;
}

PsoConfig rollout_pso_config(const RunConfig& cfg) {
  PsoConfig pso;
  pso.n_particles = cfg.rollout_opt_particles;
  pso.n_iterations = cfg.rollout_opt_iterations;
  return pso;
}

struct Selection {
  DesignHistoryEntry entry;
  long optimizer_evaluations = 0;
  bool fallback = false;
};

std::vector<DesignVector> history_designs(
    const std::vector<DesignHistoryEntry>& history) {
  std::vector<DesignVector> out;
  out.reserve(history.size());
  for (const auto& h : history) out.push_back(h.design);
  return out;
}

}  // namespace

std::vector<DesignVector> initial_designs(const Environment& env, int n,
                                          RngStream& rng) {
  if (n < 1) throw std::invalid_argument("initial_designs: n must be >= 1");
  std::vector<DesignVector> designs;
  designs.push_back(env.original_design());
  for (int i = 1; i < n; ++i) {
    designs.push_back(sample_uniform(env.spec().design_space, rng));
  }
  return designs;
}

RunOutput run_coadaptation(const RunConfig& cfg, std::uint64_t seed,
                           const std::string& run_dir,
                           const CheckpointData* resume_from,
                           int stop_after) {
  const auto env = make_environment(cfg.env_id);
  const EnvSpec& spec = env->spec();
  const DesignSpace& space = spec.design_space;
  const Schedule& sched = cfg.schedule;
  const int n_init = std::min(sched.n_initial_designs, sched.max_designs);

  RngStream init_rng(seed, Stream::Init);
  RngStream env_rng(seed, Stream::Env);
  RngStream policy_rng(seed, Stream::Policy);
  RngStream opt_rng(seed, Stream::Optimizer);
  RngStream explore_rng(seed, Stream::Exploration);

  AgentPair agent(spec.state_dim, spec.action_dim, space, cfg.sac, init_rng);
  PopulationBuffer pop_buf;
  IndividualBuffer ind_buf;
  StartStateBuffer s0_buf;
  RolloutCounter counter;

  std::vector<DesignHistoryEntry> history;
  long episodes_executed = 0;
  int first_design = 1;

  // Pre-selected initial block: the original design plus random designs,
  // fixed per seed. Drawn before any resume handling so the exploration
  // stream stays aligned with the original run.
  const auto init_block = initial_designs(*env, n_init, explore_rng);

  if (resume_from == nullptr) {
    for (const auto& d : init_block) {
      history.push_back(DesignHistoryEntry{
          d, "initial", std::numeric_limits<double>::quiet_NaN()});
    }
  } else {
    agent = resume_from->agent;
    history = resume_from->history;
    episodes_executed = resume_from->episodes_executed;
    counter.add(resume_from->selection_rollouts);
    first_design = static_cast<int>(resume_from->completed_designs) + 1;
    if (resume_from->has_buffers) {
      for (const auto& dt : resume_from->population_entries) pop_buf.push(dt);
      for (const auto& t : resume_from->individual_entries) ind_buf.push(t);
      for (const auto& [s, d] : resume_from->start_entries) s0_buf.push(s, d);
    }
    if (resume_from->rng_states.size() == 4) {
      RngStream* streams[4] = {&env_rng, &policy_rng, &opt_rng, &explore_rng};
      for (int k = 0; k < 4; ++k) {
        std::istringstream ss(resume_from->rng_states[std::size_t(k)]);
        ss >> streams[k]->engine();
        if (!ss) throw std::runtime_error("checkpoint: bad rng state");
      }
    }
  }

  const bool writing = !run_dir.empty();
  std::unique_ptr<EpisodeCsvWriter> episode_log;
  std::unique_ptr<SelectionLogWriter> selection_log;
  if (writing) {
    std::filesystem::create_directories(run_dir);
    const bool append = resume_from != nullptr;
    if (!append) {
      std::ofstream cfg_out(run_dir + "/config.txt", std::ios::trunc);
      cfg_out << cfg.serialize();
    }
    episode_log =
        std::make_unique<EpisodeCsvWriter>(run_dir + "/episodes.csv", append);
    selection_log = std::make_unique<SelectionLogWriter>(
        run_dir + "/selections.jsonl", append);
  }
  const std::string run_id = "seed" + std::to_string(seed);

  // Persistent CMA-ES state for the evolutionary baseline.
  std::unique_ptr<CmaEs> evo_state;

  auto select_next = [&](int next_index) -> Selection {
    Selection sel;
    const auto evaluated = history_designs(history);

    if (cfg.mode == RunMode::RandomOnly) {
      sel.entry = {sample_uniform(space, explore_rng), "baseline",
                   std::numeric_limits<double>::quiet_NaN()};
      return sel;
    }

    if (cfg.mode == RunMode::EvoLoopCmaes) {
      if (!evo_state) {
        CmaEsConfig ec;
        ec.lambda = cfg.evo_lambda;
        evo_state = std::make_unique<CmaEs>(space, ec, opt_rng);
      }
      auto candidates = evo_state->ask();
      std::vector<double> values;
      values.reserve(candidates.size());
      for (const auto& c : candidates) {
        values.push_back(rollout_objective(c, *env, agent.population,
                                           cfg.rollout_episodes_per_eval,
                                           env_rng, counter));
      }
      evo_state->tell(values);
      const auto best = static_cast<std::size_t>(std::distance(
          values.begin(), std::max_element(values.begin(), values.end())));
      sel.entry = {candidates[best], "baseline", values[best]};
      sel.optimizer_evaluations = static_cast<long>(values.size());
      return sel;
    }

    // Proposed/rollout-baseline modes: the first post-initial design is
    // exploitation, then strict alternation.
    const int post = next_index - n_init;
    const bool exploit = post % 2 == 1;

    if (!exploit) {
      const auto strategy = cfg.exploration == "novelty"
                                ? ExplorationStrategy::Novelty
                                : ExplorationStrategy::Random;
      auto res =
          select_exploration_design(strategy, space, evaluated,
                                    cfg.novelty_neighbors,
                                    exploit_pso_config(cfg), explore_rng);
      if (res.fell_back_to_random) {
        std::cerr << "[coadapt] warning: novelty exploration fell back to "
                     "random (no evaluated designs)\n";
      }
      sel.entry = {res.design, "explore",
                   std::numeric_limits<double>::quiet_NaN()};
      sel.fallback = res.fell_back_to_random;
      return sel;
    }

    try {
      OptResult res;
      if (cfg.mode == RunMode::QObjective) {
        ObjectiveContext ctx;
        ctx.networks = &agent.population;
        ctx.start_batch = sample_start_states(
            s0_buf, static_cast<std::size_t>(cfg.n_start_states), opt_rng);
        ctx.evaluated_designs = evaluated;
        Objective f = [&ctx](const DesignVector& x) {
          return q_objective(x, ctx);
        };
        if (cfg.optimizer == "cmaes") {
          CmaEsConfig ec;
          ec.lambda = cfg.cmaes_lambda;
          ec.n_iterations = cfg.opt_iterations;
          res = cma_es_maximize(f, space, ec, opt_rng);
        } else {
          res = pso_maximize(f, space, exploit_pso_config(cfg), opt_rng);
        }
      } else {
        Objective f = [&](const DesignVector& x) {
          return rollout_objective(x, *env, agent.population,
                                   cfg.rollout_episodes_per_eval, env_rng,
                                   counter);
        };
        res = pso_maximize(f, space, rollout_pso_config(cfg), opt_rng);
      }
      sel.entry = {clamp(res.best_design, space), "exploit", res.best_value};
      sel.optimizer_evaluations = res.evaluations;
      return sel;
    } catch (const std::exception& e) {
      std::cerr << "[coadapt] warning: design optimizer failed (" << e.what()
                << "); falling back to random selection\n";
      sel.entry = {sample_uniform(space, explore_rng), "exploit",
                   std::numeric_limits<double>::quiet_NaN()};
      sel.fallback = true;
      return sel;
    }
  };

  auto write_checkpoint = [&](int completed) {
    if (!writing) return;
    CheckpointData data;
    data.root_seed = seed;
    data.config_text = cfg.serialize();
    data.history = history;
    data.completed_designs = completed;
    data.episodes_executed = episodes_executed;
    data.selection_rollouts = counter.get();
    data.agent = agent;
    const std::size_t cap = 1024;
    const std::size_t n = s0_buf.size();
    const std::size_t take = std::min(cap, n);
    for (std::size_t k = 0; k < take; ++k) {
      data.start_state_sample.push_back(s0_buf.state_at(k * n / take));
    }
    for (RngStream* r : {&env_rng, &policy_rng, &opt_rng, &explore_rng}) {
      std::ostringstream ss;
      ss << r->engine();
      data.rng_states.push_back(ss.str());
    }
    if (cfg.checkpoint_buffers) {
      data.has_buffers = true;
      for (std::size_t k = 0; k < pop_buf.size(); ++k) {
        data.population_entries.push_back(pop_buf.at(k));
      }
      for (std::size_t k = 0; k < ind_buf.size(); ++k) {
        data.individual_entries.push_back(ind_buf.at(k));
      }
      for (std::size_t k = 0; k < s0_buf.size(); ++k) {
        data.start_entries.emplace_back(s0_buf.state_at(k), s0_buf.design_at(k));
      }
    }
    save_checkpoint(run_dir + "/checkpoint.bin", data);
  };

  const int last_design =
      stop_after > 0 ? std::min(stop_after, sched.max_designs)
                     : sched.max_designs;

  RunOutput output;
  for (int i = first_design; i <= last_design; ++i) {
    if (static_cast<int>(history.size()) < i) {
      throw std::runtime_error("coadapt: missing design for index " +
                               std::to_string(i));
    }
    const DesignVector design = history[static_cast<std::size_t>(i - 1)].design;
    const std::string& mode_label =
        history[static_cast<std::size_t>(i - 1)].mode;

    if (!cfg.population_only) agent.clone_population_to_individual();
    ind_buf.clear();
    const NetworkSet& actor =
        cfg.population_only ? agent.population : agent.individual;

    CoadaptRecord rec;
    rec.design_index = i;
    rec.design = design;
    rec.mode = mode_label;
    rec.objective_value_at_selection =
        history[static_cast<std::size_t>(i - 1)].objective_value;

    const int n_episodes =
        i <= n_init ? sched.episodes_initial : sched.episodes_later;
    for (int e = 1; e <= n_episodes; ++e) {
      State s = env->reset(design, env_rng);
      s0_buf.push(s, design);
      double episode_return = 0.0;
      for (int t = 1; t <= spec.horizon; ++t) {
        const Action a = actor.act(s, design, /*stochastic=*/true, policy_rng);
        StepResult sr = env->step(s, a, design, t);
        Transition tr{s, a, sr.reward, sr.s_next, sr.done};
        ind_buf.push(tr);
        pop_buf.push(DesignTransition{tr, design});
        episode_return += sr.reward;
        s = std::move(sr.s_next);
        if (tr.done) break;
      }
      ++episodes_executed;
      agent.train_for_episode(ind_buf, pop_buf, design, policy_rng,
                              cfg.population_only);
      rec.returns.push_back(episode_return);
      rec.best_return = std::max(rec.best_return, episode_return);
      if (episode_log) {
        episode_log->write_row(run_id, i, mode_label, e, episode_return,
                               episodes_executed + counter.get());
      }
    }
    rec.cumulative_rollouts = episodes_executed + counter.get();
    output.records.push_back(std::move(rec));

    if (i < sched.max_designs && static_cast<int>(history.size()) == i) {
      Selection sel = select_next(i + 1);
      history.push_back(sel.entry);
      if (selection_log) {
        selection_log->write(i + 1, sel.entry.mode, sel.entry.design,
                             sel.entry.objective_value,
                             sel.optimizer_evaluations, sel.fallback);
      }
    }
    write_checkpoint(i);
  }

  output.episodes_executed = episodes_executed;
  output.selection_rollouts = counter.get();

  if (writing && last_design == sched.max_designs) {
    std::vector<std::string> files = {"config.txt", "episodes.csv",
                                      "selections.jsonl", "checkpoint.bin"};
    write_manifest(run_dir, cfg, seed, files);
  }
  return output;
}

}  // namespace coadapt
