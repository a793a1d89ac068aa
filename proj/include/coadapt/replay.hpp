#pragma once

#include "coadapt/core.hpp"

#include <deque>
#include <vector>

namespace coadapt {

/// FIFO ring over design-tagged transitions, shared across all designs.
class PopulationBuffer {
 public:
  explicit PopulationBuffer(std::size_t capacity = 1'000'000);

  void push(DesignTransition item);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const DesignTransition& at(std::size_t i) const { return entries_[i]; }

 private:
  std::size_t capacity_;
  std::deque<DesignTransition> entries_;
};

/// FIFO ring over transitions of the current design only; emptied at every
/// design switch.
class IndividualBuffer {
 public:
  explicit IndividualBuffer(std::size_t capacity = 100'000);

  void push(Transition item);
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return entries_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Transition> entries_;
};

/// Append-only log of every episode start state seen so far, tagged with
/// the design it was collected under (the tag is diagnostic only; sampling
/// ignores it).
class StartStateBuffer {
 public:
  void push(State s, DesignVector design);
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const State& state_at(std::size_t i) const { return states_[i]; }
  const DesignVector& design_at(std::size_t i) const { return designs_[i]; }

 private:
  std::vector<State> states_;
  std::vector<DesignVector> designs_;
};

/// Mixed batch for training individual networks: round(pop_frac * batch)
/// items uniformly from the population buffer (keeping their stored designs),
/// the rest uniformly from the individual buffer tagged with current_design.
/// The composition is exact, not probabilistic; the returned order is
/// shuffled. An empty population buffer falls back to individual samples.
std::vector<DesignTransition> sample_mixed(const IndividualBuffer& ind,
                                           const PopulationBuffer& pop,
                                           const DesignVector& current_design,
                                           std::size_t batch, double pop_frac,
                                           RngStream& rng);

/// Uniform-with-replacement batch from the population buffer.
std::vector<DesignTransition> sample_population(const PopulationBuffer& pop,
                                                std::size_t batch,
                                                RngStream& rng);

/// Uniform-with-replacement batch of start states (designs ignored).
std::vector<State> sample_start_states(const StartStateBuffer& buf,
                                       std::size_t n, RngStream& rng);

}  // namespace coadapt
