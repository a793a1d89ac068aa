#include "coadapt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace coadapt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<EpisodeRow> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty episode csv: " + path);
  }
  if (line != "run_id,design_index,mode,episode,return,cumulative_rollouts") {
    throw std::runtime_error("unexpected episode csv header in " + path);
  }
  std::vector<EpisodeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw std::runtime_error("malformed episode csv row in " + path);
    }
    EpisodeRow row;
    row.run_id = f[0];
    row.design_index = std::stoi(f[1]);
    row.mode = f[2];
    row.episode = std::stoi(f[3]);
    row.episode_return = std::stod(f[4]);
    row.cumulative_rollouts = std::stol(f[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

LandscapeSlice landscape_slice(const Objective& f, const DesignSpace& space,
                               const DesignVector& base, int dim_a, int dim_b,
                               int resolution) {
  const int dim = space.dim();
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (dim_a < 0 || dim_a >= dim) {
    throw std::invalid_argument("dim_a out of range");
  }
  const bool two_d = dim >= 2;
  if (two_d && (dim_b < 0 || dim_b >= dim || dim_b == dim_a)) {
    throw std::invalid_argument("dim_b out of range");
  }
  if (base.size() != dim) throw std::invalid_argument("base has wrong size");

  LandscapeSlice slice;
  slice.dim_a = dim_a;
  slice.dim_b = two_d ? dim_b : 0;
  slice.resolution = resolution;
  slice.base = base;

  auto grid_value = [&](int dim_index, int step) {
    const double lo = space.lower(dim_index);
    const double hi = space.upper(dim_index);
    return lo + (hi - lo) * step / (resolution - 1);
  };

  DesignVector d = base;
  const int rows = two_d ? resolution : 1;
  slice.points.reserve(static_cast<std::size_t>(rows) * resolution);
  for (int j = 0; j < rows; ++j) {
    if (two_d) d(dim_b) = grid_value(dim_b, j);
    for (int i = 0; i < resolution; ++i) {
      d(dim_a) = grid_value(dim_a, i);
      LandscapePoint p;
      p.x = d(dim_a);
      p.y = two_d ? d(dim_b) : 0.0;
      p.value = f(d);
      slice.points.push_back(p);
    }
  }
  return slice;
}

void write_landscape_csv(const std::string& path,
                         const LandscapeSlice& slice) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "dim_i_value,dim_j_value,objective\n";
  for (const auto& p : slice.points) {
    out << csv_double(p.x) << ',' << csv_double(p.y) << ','
        << csv_double(p.value) << '\n';
  }
}

PcaModel pca_fit(const std::vector<DesignVector>& designs) {
  if (designs.size() < 3) {
    throw std::invalid_argument("pca_fit needs at least three designs");
  }
  const int dim = static_cast<int>(designs.front().size());
  if (dim < 2) throw std::invalid_argument("pca_fit needs design dim >= 2");
  const int n = static_cast<int>(designs.size());
  Matrix x(n, dim);
  for (int i = 0; i < n; ++i) {
    if (designs[static_cast<std::size_t>(i)].size() != dim) {
      throw std::invalid_argument("pca_fit: inconsistent design dimensions");
    }
    x.row(i) = designs[static_cast<std::size_t>(i)].transpose();
  }
  PcaModel res;
  res.mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - res.mean.transpose();
  const Matrix cov = centered.transpose() * centered / double(n - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("pca_fit: eigendecomposition failed");
  }
  res.total_variance = std::max(eig.eigenvalues().sum(), 0.0);
  if (eig.eigenvalues()(dim - 1) <= 1e-12 * std::max(1.0, res.total_variance)) {
    throw std::runtime_error("pca_fit: degenerate design set (zero variance)");
  }
  res.components.resize(dim, 2);
  res.explained_variance.resize(2);
  // SelfAdjointEigenSolver sorts ascending; take the top two in reverse.
  for (int c = 0; c < 2; ++c) {
    Vector v = eig.eigenvectors().col(dim - 1 - c);
    for (int k = 0; k < dim; ++k) {
      if (std::abs(v(k)) > 1e-12) {
        if (v(k) < 0.0) v = -v;
        break;
      }
    }
    res.components.col(c) = v;
    res.explained_variance(c) = std::max(eig.eigenvalues()(dim - 1 - c), 0.0);
  }
  return res;
}

Vector pca_project(const PcaModel& model, const DesignVector& design) {
  return model.components.transpose() * (design - model.mean);
}

void write_pca_csv(const std::string& path, const PcaModel& model,
                   const std::vector<DesignHistoryEntry>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "design_index,pc1,pc2,objective,mode\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Vector p = pca_project(model, history[i].design);
    out << (i + 1) << ',' << csv_double(p(0)) << ',' << csv_double(p(1)) << ','
        << csv_double(history[i].objective_value) << ',' << history[i].mode
        << '\n';
  }
}

std::vector<CompareRow> compare_runs(const std::vector<RunGroup>& groups) {
  std::vector<CompareRow> out;
  for (const auto& group : groups) {
    if (group.episode_csv_paths.empty()) {
      throw std::invalid_argument("compare_runs: empty group '" + group.mode +
                                  "'");
    }
    // Per seed: running best return and final rollout count per design index.
    std::vector<std::map<int, double>> best_per_seed;
    std::vector<std::map<int, long>> rollouts_per_seed;
    for (const auto& path : group.episode_csv_paths) {
      const auto rows = read_episode_csv(path);
      std::map<int, double> best;
      std::map<int, long> rollouts;
      double running = -std::numeric_limits<double>::infinity();
      for (const auto& r : rows) {
        running = std::max(running, r.episode_return);
        best[r.design_index] = running;
        rollouts[r.design_index] = r.cumulative_rollouts;
      }
      best_per_seed.push_back(std::move(best));
      rollouts_per_seed.push_back(std::move(rollouts));
    }
    const auto& index_set = best_per_seed.front();
    for (const auto& per_seed : best_per_seed) {
      if (per_seed.size() != index_set.size()) {
        throw std::runtime_error(
            "compare_runs: runs in group '" + group.mode +
            "' cover different design indices");
      }
    }
    for (const auto& [idx, unused] : index_set) {
      (void)unused;
      const double n = double(best_per_seed.size());
      double mean = 0.0, mean_roll = 0.0;
      for (std::size_t s = 0; s < best_per_seed.size(); ++s) {
        const auto it = best_per_seed[s].find(idx);
        if (it == best_per_seed[s].end()) {
          throw std::runtime_error(
              "compare_runs: missing design index in group '" + group.mode +
              "'");
        }
        mean += it->second;
        mean_roll += double(rollouts_per_seed[s].at(idx));
      }
      mean /= n;
      mean_roll /= n;
      double var = 0.0;
      for (std::size_t s = 0; s < best_per_seed.size(); ++s) {
        const double d = best_per_seed[s].at(idx) - mean;
        var += d * d;
      }
      CompareRow row;
      row.design_index = idx;
      row.mode = group.mode;
      row.mean_best = mean;
      row.std_best = std::sqrt(var / n);
      row.mean_rollouts = mean_roll;
      out.push_back(std::move(row));
    }
  }
  return out;
}

void write_compare_csv(const std::string& path,
                       const std::vector<CompareRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "design_index,mode,mean_best,std_best,mean_rollouts\n";
  for (const auto& r : rows) {
    out << r.design_index << ',' << r.mode << ',' << csv_double(r.mean_best)
        << ',' << csv_double(r.std_best) << ',' << csv_double(r.mean_rollouts)
        << '\n';
  }
}

}  // namespace coadapt
