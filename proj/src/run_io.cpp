#include "coadapt/run_io.hpp"

#include "coadapt/env.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstring>

namespace coadapt {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'A', 'D', 'C', 'K', 'P', '\x01'};

void write_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_vector(std::ostream& out, const Vector& v) {
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) write_f64(out, v[i]);
}

std::uint8_t read_u8(std::istream& in) {
  std::uint8_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string read_string(std::istream& in) {
  const auto n = read_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}
Vector read_vector(std::istream& in) {
  const auto n = read_u32(in);
  Vector v(static_cast<int>(n));
  for (std::uint32_t i = 0; i < n; ++i) v[static_cast<int>(i)] = read_f64(in);
  return v;
}

void write_mlp(std::ostream& out, const Mlp& net) {
  write_u32(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) write_u32(out, static_cast<std::uint32_t>(s));
  const auto flat = net.flatten();
  write_u64(out, flat.size());
  for (double p : flat) write_f64(out, p);
}

void read_mlp(std::istream& in, Mlp& net) {
  const auto n_sizes = read_u32(in);
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    sizes.push_back(static_cast<int>(read_u32(in)));
  }
  if (sizes != net.sizes()) {
    throw std::runtime_error(
        "checkpoint: network shape does not match the config");
  }
  const auto n_params = read_u64(in);
  std::vector<double> flat(n_params);
  for (auto& p : flat) p = read_f64(in);
  net.unflatten(flat);
}

void write_network_set(std::ostream& out, const NetworkSet& set) {
  write_mlp(out, set.policy().trunk());
  write_mlp(out, set.critic1());
  write_mlp(out, set.critic2());
  write_mlp(out, set.target1());
  write_mlp(out, set.target2());
  write_f64(out, set.log_alpha());
  write_u64(out, static_cast<std::uint64_t>(set.update_count()));
}

void read_network_set(std::istream& in, NetworkSet& set) {
  read_mlp(in, set.policy().trunk());
  read_mlp(in, set.critic1());
  read_mlp(in, set.critic2());
  read_mlp(in, set.target1());
  read_mlp(in, set.target2());
  set.set_log_alpha(read_f64(in));
  set.set_update_count(static_cast<long>(read_u64(in)));
}

void write_transition(std::ostream& out, const Transition& t) {
  write_vector(out, t.s);
  write_vector(out, t.a);
  write_f64(out, t.r);
  write_vector(out, t.s_next);
  write_u8(out, t.done ? 1 : 0);
}

Transition read_transition(std::istream& in) {
  Transition t;
  t.s = read_vector(in);
  t.a = read_vector(in);
  t.r = read_f64(in);
  t.s_next = read_vector(in);
  t.done = read_u8(in) != 0;
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof kMagic);
  write_u64(out, data.root_seed);
  write_string(out, data.config_text);
  write_u64(out, static_cast<std::uint64_t>(data.completed_designs));
  write_u64(out, static_cast<std::uint64_t>(data.episodes_executed));
  write_u64(out, static_cast<std::uint64_t>(data.selection_rollouts));

  write_u32(out, static_cast<std::uint32_t>(data.rng_states.size()));
  for (const auto& s : data.rng_states) write_string(out, s);

  write_u32(out, static_cast<std::uint32_t>(data.history.size()));
  for (const auto& h : data.history) {
    write_string(out, h.mode);
    write_f64(out, h.objective_value);
    write_vector(out, h.design);
  }

  write_network_set(out, data.agent.population);
  write_network_set(out, data.agent.individual);

  write_u32(out, static_cast<std::uint32_t>(data.start_state_sample.size()));
  for (const auto& s : data.start_state_sample) write_vector(out, s);

  write_u8(out, data.has_buffers ? 1 : 0);
  if (data.has_buffers) {
    write_u32(out, static_cast<std::uint32_t>(data.population_entries.size()));
    for (const auto& dt : data.population_entries) {
      write_transition(out, dt.transition);
      write_vector(out, dt.design);
    }
    write_u32(out, static_cast<std::uint32_t>(data.individual_entries.size()));
    for (const auto& t : data.individual_entries) write_transition(out, t);
    write_u32(out, static_cast<std::uint32_t>(data.start_entries.size()));
    for (const auto& [s, d] : data.start_entries) {
      write_vector(out, s);
      write_vector(out, d);
    }
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  }

  CheckpointData data;
  data.root_seed = read_u64(in);
  data.config_text = read_string(in);
  data.completed_designs = static_cast<long>(read_u64(in));
  data.episodes_executed = static_cast<long>(read_u64(in));
  data.selection_rollouts = static_cast<long>(read_u64(in));

  const auto n_rng = read_u32(in);
  for (std::uint32_t i = 0; i < n_rng; ++i) {
    data.rng_states.push_back(read_string(in));
  }

  const auto n_hist = read_u32(in);
  for (std::uint32_t i = 0; i < n_hist; ++i) {
    DesignHistoryEntry h;
    h.mode = read_string(in);
    h.objective_value = read_f64(in);
    h.design = read_vector(in);
    data.history.push_back(std::move(h));
  }

  const RunConfig cfg = config_from_map(parse_key_values(data.config_text));
  const auto env = make_environment(cfg.env_id);
  RngStream dummy(0, 0);
  data.agent = AgentPair(env->spec().state_dim, env->spec().action_dim,
                         env->spec().design_space, cfg.sac, dummy);
  read_network_set(in, data.agent.population);
  read_network_set(in, data.agent.individual);

  const auto n_states = read_u32(in);
  for (std::uint32_t i = 0; i < n_states; ++i) {
    data.start_state_sample.push_back(read_vector(in));
  }

  data.has_buffers = read_u8(in) != 0;
  if (data.has_buffers) {
    const auto n_pop = read_u32(in);
    for (std::uint32_t i = 0; i < n_pop; ++i) {
      DesignTransition dt;
      dt.transition = read_transition(in);
      dt.design = read_vector(in);
      data.population_entries.push_back(std::move(dt));
    }
    const auto n_ind = read_u32(in);
    for (std::uint32_t i = 0; i < n_ind; ++i) {
      data.individual_entries.push_back(read_transition(in));
    }
    const auto n_start = read_u32(in);
    for (std::uint32_t i = 0; i < n_start; ++i) {
      State s = read_vector(in);
      DesignVector d = read_vector(in);
      data.start_entries.emplace_back(std::move(s), std::move(d));
    }
  }
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  return data;
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EpisodeCsvWriter::EpisodeCsvWriter(const std::string& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot write episode log: " + path);
  if (!append) {
    out_ << "run_id,design_index,mode,episode,return,cumulative_rollouts\n";
    out_.flush();
  }
}

void EpisodeCsvWriter::write_row(const std::string& run_id, int design_index,
                                 const std::string& mode, int episode,
                                 double episode_return,
                                 long cumulative_rollouts) {
  out_ << run_id << ',' << design_index << ',' << mode << ',' << episode << ','
       << csv_double(episode_return) << ',' << cumulative_rollouts << '\n';
  out_.flush();
}

SelectionLogWriter::SelectionLogWriter(const std::string& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot write selection log: " + path);
}

void SelectionLogWriter::write(int design_index, const std::string& mode,
                               const DesignVector& design,
                               double objective_value,
                               long optimizer_evaluations, bool fallback) {
  nlohmann::json j;
  j["design_index"] = design_index;
  j["mode"] = mode;
  j["design"] = std::vector<double>(design.data(), design.data() + design.size());
  if (std::isfinite(objective_value)) j["objective_value"] = objective_value;
  j["optimizer_evaluations"] = optimizer_evaluations;
  if (fallback) j["fallback_to_random"] = true;
  out_ << j.dump() << '\n';
  out_.flush();
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_manifest(const std::string& run_dir, const RunConfig& cfg,
                    std::uint64_t seed, const std::vector<std::string>& files) {
  nlohmann::json j;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  j["config_hash"] = hash_hex;
  j["code_version"] = "coadapt 0.1.0";
  j["seed"] = seed;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& f : files) {
    char sum[32];
    std::snprintf(sum, sizeof sum, "%016llx",
                  static_cast<unsigned long long>(
                      file_checksum(run_dir + "/" + f)));
    checks[f] = sum;
  }
  j["files"] = checks;
  std::ofstream out(run_dir + "/manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in " + run_dir);
  out << j.dump(2) << '\n';
}

}  // namespace coadapt
