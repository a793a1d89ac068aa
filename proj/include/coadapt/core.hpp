#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace coadapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Morphology parameters of a candidate design (unitless scale factors).
using DesignVector = Vector;
/// Environment state vector.
using State = Vector;
/// Action vector, each component in [-1, 1].
using Action = Vector;

/// Box bounds for the admissible design vectors.
struct DesignSpace {
  Vector lower;
  Vector upper;

  DesignSpace() = default;
  DesignSpace(Vector lo, Vector hi);

  int dim() const { return static_cast<int>(lower.size()); }
  Vector span() const { return upper - lower; }
  Vector center() const { return 0.5 * (lower + upper); }
  bool contains(const DesignVector& d, double tol = 0.0) const;

  /// Linear map of an in-bounds design onto [-1, 1] per component.
  Vector normalize(const DesignVector& d) const;
};

/// One environment step: (s, a, r, s', done).
struct Transition {
  State s;
  Action a;
  double r = 0.0;
  State s_next;
  bool done = false;
};

/// Transition tagged with the design it was collected under.
struct DesignTransition {
  Transition transition;
  DesignVector design;
};

/// Named sub-streams derived from the single root seed, so each module
/// draws from its own reproducible sequence.
enum class Stream : std::uint64_t {
  Env = 1,
  Policy = 2,
  Optimizer = 3,
  Exploration = 4,
  Replay = 5,
  Init = 6,
};

/// Deterministic random stream: identical (seed, stream) pairs yield
/// identical draw sequences.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, Stream stream)
      : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// Per-component projection onto the box bounds. Idempotent.
DesignVector clamp(const DesignVector& design, const DesignSpace& space);

/// i.i.d. uniform draw from the box.
DesignVector sample_uniform(const DesignSpace& space, RngStream& rng);

}  // namespace coadapt
