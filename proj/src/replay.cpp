#include "coadapt/replay.hpp"

#include <algorithm>
#include <cmath>

namespace coadapt {

PopulationBuffer::PopulationBuffer(std::size_t capacity)
    : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("capacity must be > 0");
}

void PopulationBuffer::push(DesignTransition item) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(item));
}

IndividualBuffer::IndividualBuffer(std::size_t capacity)
    : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("capacity must be > 0");
}

void IndividualBuffer::push(Transition item) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(item));
}

void StartStateBuffer::push(State s, DesignVector design) {
  states_.push_back(std::move(s));
  designs_.push_back(std::move(design));
}

std::vector<DesignTransition> sample_mixed(const IndividualBuffer& ind,
                                           const PopulationBuffer& pop,
                                           const DesignVector& current_design,
                                           std::size_t batch, double pop_frac,
                                           RngStream& rng) {
  if (batch == 0) throw std::invalid_argument("sample_mixed: batch must be > 0");
  if (pop_frac < 0.0 || pop_frac > 1.0) {
    throw std::invalid_argument("sample_mixed: pop_frac outside [0, 1]");
  }
  if (ind.empty() && pop.empty()) {
    throw std::runtime_error("sample_mixed: both buffers empty");
  }

  // Round-half-up split, e.g. 256 * 0.1 -> 26 population samples.
  std::size_t n_pop = static_cast<std::size_t>(
      std::floor(pop_frac * static_cast<double>(batch) + 0.5));
  if (pop.empty()) n_pop = 0;
  if (ind.empty()) n_pop = batch;

  std::vector<DesignTransition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < n_pop; ++i) {
    out.push_back(pop.at(rng.uniform_index(pop.size())));
  }
  for (std::size_t i = n_pop; i < batch; ++i) {
    out.push_back(
        DesignTransition{ind.at(rng.uniform_index(ind.size())), current_design});
  }
  std::shuffle(out.begin(), out.end(), rng.engine());
  return out;
}

std::vector<DesignTransition> sample_population(const PopulationBuffer& pop,
                                                std::size_t batch,
                                                RngStream& rng) {
  if (pop.empty()) {
    throw std::runtime_error("sample_population: buffer empty");
  }
  std::vector<DesignTransition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    out.push_back(pop.at(rng.uniform_index(pop.size())));
  }
  return out;
}

std::vector<State> sample_start_states(const StartStateBuffer& buf,
                                       std::size_t n, RngStream& rng) {
  if (buf.empty()) {
    throw std::runtime_error("sample_start_states: buffer empty");
  }
  std::vector<State> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(buf.state_at(rng.uniform_index(buf.size())));
  }
  return out;
}

}  // namespace coadapt
