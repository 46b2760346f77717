#include "terra/train/replay_buffer.hpp"

#include <stdexcept>

namespace terra::train {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::add(const Trajectory& t) {
  for (const TrajectoryStep& step : t.steps) add({step.state, step.pi, static_cast<double>(t.z[step.player])});
}

void ReplayBuffer::add(Example e) {
  examples_.push_back(std::move(e));
  while (examples_.size() > capacity_) examples_.pop_front();
}

nn::Batch<double> ReplayBuffer::sample(int n) {
  if (examples_.empty()) throw std::logic_error("sampling an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, examples_.size() - 1);
  std::vector<const Example*> chosen;
  for (int i = 0; i < n; ++i) chosen.push_back(&examples_[pick(rng_)]);
  return make_batch(chosen);
}

nn::Batch<double> make_batch(const std::vector<const Example*>& examples) {
  const int n = static_cast<int>(examples.size());
  nn::Batch<double> b;
  b.x = nn::Mat<double>(static_cast<Eigen::Index>(n) * encoding::kPlaneSize, encoding::kNumLayers);
  b.pi_main = nn::Mat<double>::Zero(n, encoding::kNumMainActions);
  b.pi_town = nn::Mat<double>::Zero(n, encoding::kNumTownActions);
  b.town_valid = nn::Vec<double>::Zero(n);
  b.z = nn::Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    const Example& e = *examples[i];
    nn::write_input(encoding::encode_state(e.state), i, b.x);
    for (auto [index, p] : e.pi) {
      if (index < encoding::kNumMainActions) {
        b.pi_main(i, index) = p;
      } else {
        b.pi_town(i, index - encoding::kNumMainActions) = p;
      }
    }
    b.town_valid(i) = e.state.pending_towns > 0 ? 1.0 : 0.0;
    b.z(i) = e.z;
  }
  return b;
}

}  // namespace terra::train
