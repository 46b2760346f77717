#pragma once

#include <cstdint>
#include <deque>
#include <random>

#include "terra/nn/network.hpp"
#include "terra/train/selfplay.hpp"

namespace terra::train {

/// States are kept instead of tensors and encoded when a batch is drawn.
struct Example {
  GameState state;
  std::vector<std::pair<int, double>> pi;
  double z = 0.0;  // outcome for the player to move in `state`
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000, std::uint64_t seed = 0);

  /// Appends every step; the oldest examples are dropped beyond capacity.
  void add(const Trajectory& t);
  void add(Example e);

  std::size_t size() const { return examples_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Example& at(std::size_t i) const { return examples_[i]; }

  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  /// Uniform draw with replacement.
  nn::Batch<double> sample(int n);

 private:
  std::size_t capacity_;
  std::deque<Example> examples_;
  std::mt19937_64 rng_;
};

nn::Batch<double> make_batch(const std::vector<const Example*>& examples);

}  // namespace terra::train
