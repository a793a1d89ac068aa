#include "coadapt/core.hpp"

namespace coadapt {

namespace {

// splitmix64; decorrelates (seed, stream) pairs before seeding the engine.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

DesignSpace::DesignSpace(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("DesignSpace: bound dimensions mismatch");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("DesignSpace: lower[" + std::to_string(i) +
                                  "] must be < upper[" + std::to_string(i) +
                                  "]");
    }
  }
}

bool DesignSpace::contains(const DesignVector& d, double tol) const {
  if (d.size() != lower.size()) return false;
  for (int i = 0; i < d.size(); ++i) {
    if (d[i] < lower[i] - tol || d[i] > upper[i] + tol) return false;
  }
  return true;
}

Vector DesignSpace::normalize(const DesignVector& d) const {
  if (d.size() != lower.size()) {
    throw std::invalid_argument("DesignSpace::normalize: dimension mismatch");
  }
  return (2.0 * (d - lower).array() / span().array() - 1.0).matrix();
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      engine_(mix(mix(seed) ^ mix(stream_id ^ 0xa5a5a5a5a5a5a5a5ULL))) {}

double RngStream::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double RngStream::normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

DesignVector clamp(const DesignVector& design, const DesignSpace& space) {
  if (design.size() != space.lower.size()) {
    throw std::invalid_argument("clamp: design dimension mismatch");
  }
  return design.cwiseMax(space.lower).cwiseMin(space.upper);
}

DesignVector sample_uniform(const DesignSpace& space, RngStream& rng) {
  DesignVector d(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    d[i] = rng.uniform(space.lower[i], space.upper[i]);
  }
  return d;
}

}  // namespace coadapt
