#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "terra/encoding/codec.hpp"
#include "terra/nn/config.hpp"
#include "terra/nn/layers.hpp"

namespace terra::nn {

enum class Mode { Training, Inference };

template <class Scalar>
struct Output {
  Mat<Scalar> main;   // B x 2138, softmax rows
  Mat<Scalar> town;   // B x 5, softmax rows
  Vec<Scalar> value;  // B, tanh
};

/// Training targets; `x` holds B*rows*cols rows of input layers.
template <class Scalar>
struct Batch {
  Mat<Scalar> x;
  Mat<Scalar> pi_main;
  Mat<Scalar> pi_town;
  Vec<Scalar> town_valid;  // 1 or 0
  Vec<Scalar> z;

  int size() const { return static_cast<int>(z.size()); }
};

struct LossParts {
  double value = 0.0;
  double policy = 0.0;
  double town = 0.0;
  double l2 = 0.0;
  double total() const { return value + policy + town + l2; }
};

/// Batch-mean value, policy and town terms (no L2) of predictions `out`.
template <class Scalar>
LossParts prediction_loss(const Output<Scalar>& out, const Batch<Scalar>& batch);

/// Writes one encoded state into rows [sample*S, (sample+1)*S) of `x`.
template <class Scalar>
void write_input(const encoding::StateTensor& t, int sample, Mat<Scalar>& x);

template <class Scalar>
Mat<Scalar> encode_inputs(std::span<const GameState> states);

template <class Scalar>
class Network {
 public:
  explicit Network(const NetworkConfig& cfg, std::uint64_t seed = 0);

  const NetworkConfig& config() const { return cfg_; }

  /// Re-draws all weights; batch-norm scales 1, offsets 0, running stats reset.
  void init(std::uint64_t seed);

  /// Throws std::invalid_argument when x is not B x rows*cols x layers.
  Output<Scalar> forward(const Mat<Scalar>& x, Mode mode);

  /// Loss of the batch with batch-norm in the given mode; no gradients.
  LossParts loss(const Batch<Scalar>& batch, Mode mode = Mode::Training);

  /// Training-mode loss; overwrites every parameter gradient.
  LossParts gradients(const Batch<Scalar>& batch);

  /// SGD with momentum on `batch`; returns the loss before the update.
  LossParts train_step(const Batch<Scalar>& batch);
  LossParts train_step(const Batch<Scalar>& batch, double learning_rate);

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

  /// Parameters in parameter_shapes() order.
  std::vector<Param<Scalar>*> parameters();
  std::vector<BatchNorm<Scalar>*> norms();

  std::int64_t parameter_count();

 private:
  struct Block {
    Conv2d<Scalar> conv1;
    BatchNorm<Scalar> bn1;
    Conv2d<Scalar> conv2;
    BatchNorm<Scalar> bn2;
    Mat<Scalar> mid;  // after bn1 + relu
    Mat<Scalar> out;  // after skip + relu
  };

  LossParts loss_from(const Output<Scalar>& out, const Batch<Scalar>& batch);
  void backward(const Output<Scalar>& out, const Batch<Scalar>& batch);

  NetworkConfig cfg_;
  std::uint64_t step_ = 0;
  int batch_ = 0;

  Conv2d<Scalar> stem_;
  BatchNorm<Scalar> stem_bn_;
  std::vector<Block> blocks_;
  Conv2d<Scalar> policy_conv_;
  BatchNorm<Scalar> policy_bn_;
  Linear<Scalar> main_fc_;
  Conv2d<Scalar> town_conv_;
  BatchNorm<Scalar> town_bn_;
  Linear<Scalar> town_fc_;
  Conv2d<Scalar> value_conv_;
  BatchNorm<Scalar> value_bn_;
  Linear<Scalar> value_fc1_;
  Linear<Scalar> value_fc2_;

  // Forward caches.
  Mat<Scalar> stem_out_;
  Mat<Scalar> policy_out_;
  Mat<Scalar> town_out_;
  Mat<Scalar> value_out_;
  Mat<Scalar> value_hidden_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace terra::nn
