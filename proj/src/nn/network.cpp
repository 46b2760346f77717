#include "terra/nn/network.hpp"

#include <stdexcept>

namespace terra::nn {

namespace {

constexpr int kMain = encoding::kNumMainActions;
constexpr int kTown = encoding::kNumTownActions;

// View of a (B*S) x C activation as B x (S*C); both are row-major.
template <class Scalar>
Mat<Scalar> flatten(const Mat<Scalar>& x, int batch) {
  return Eigen::Map<const Mat<Scalar>>(x.data(), batch, x.size() / batch);
}

template <class Scalar>
Mat<Scalar> unflatten(const Mat<Scalar>& x, int channels) {
  return Eigen::Map<const Mat<Scalar>>(x.data(), x.size() / channels, channels);
}

// d/dlogits of -pi . log softmax(logits) for unnormalized targets.
template <class Scalar>
Mat<Scalar> cross_entropy_grad(const Mat<Scalar>& p, const Mat<Scalar>& pi) {
  const Vec<Scalar> mass = pi.rowwise().sum();
  Mat<Scalar> g = p;
  for (Eigen::Index r = 0; r < g.rows(); ++r) g.row(r) *= mass(r);
  return g - pi;
}

template <class Scalar>
double cross_entropy(const Mat<Scalar>& p, const Mat<Scalar>& pi, Eigen::Index row) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double t = pi(row, c);
    if (t != 0.0) sum -= t * std::log(std::max(static_cast<double>(p(row, c)), 1e-300));
  }
  return sum;
}

}  // namespace

template <class Scalar>
void write_input(const encoding::StateTensor& t, int sample, Mat<Scalar>& x) {
  const auto data = t.data();
  // Layer-major (L x S) into position-major (S x L).
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> src(
      data.data(), encoding::kNumLayers, encoding::kPlaneSize);
  x.middleRows(static_cast<Eigen::Index>(sample) * encoding::kPlaneSize, encoding::kPlaneSize) =
      src.transpose().template cast<Scalar>();
}

template <class Scalar>
Mat<Scalar> encode_inputs(std::span<const GameState> states) {
  Mat<Scalar> x(static_cast<Eigen::Index>(states.size()) * encoding::kPlaneSize, encoding::kNumLayers);
  for (std::size_t i = 0; i < states.size(); ++i) write_input(encoding::encode_state(states[i]), static_cast<int>(i), x);
  return x;
}

template <class Scalar>
Network<Scalar>::Network(const NetworkConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  const int f = cfg.filters;
  const ConvGeometry same3{3, 3, 1, 1, 1, 1};
  const ConvGeometry pointwise{1, 1, 1, 1, 0, 0};
  const ConvGeometry pair{1, 2, 1, 2, 0, 0};
  stem_ = Conv2d<Scalar>("stem.conv", cfg.input_layers, f, same3);
  stem_bn_ = BatchNorm<Scalar>("stem.bn", f);
  for (int b = 0; b < cfg.blocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    blocks_.push_back({Conv2d<Scalar>(p + ".conv1", f, f, same3), BatchNorm<Scalar>(p + ".bn1", f),
                       Conv2d<Scalar>(p + ".conv2", f, f, same3), BatchNorm<Scalar>(p + ".bn2", f), {}, {}});
  }
  const int half = cfg.input_rows * (cfg.input_cols / 2);
  policy_conv_ = Conv2d<Scalar>("policy.conv", f, cfg.policy_filters, pair);
  policy_bn_ = BatchNorm<Scalar>("policy.bn", cfg.policy_filters);
  main_fc_ = Linear<Scalar>("main.fc", half * cfg.policy_filters, kMain);
  town_conv_ = Conv2d<Scalar>("town.conv", cfg.policy_filters, 1, pointwise);
  town_bn_ = BatchNorm<Scalar>("town.bn", 1);
  town_fc_ = Linear<Scalar>("town.fc", half, kTown);
  value_conv_ = Conv2d<Scalar>("value.conv", f, cfg.value_filters, pointwise);
  value_bn_ = BatchNorm<Scalar>("value.bn", cfg.value_filters);
  value_fc1_ = Linear<Scalar>("value.fc1", cfg.input_rows * cfg.input_cols * cfg.value_filters, cfg.value_fc);
  value_fc2_ = Linear<Scalar>("value.fc2", cfg.value_fc, 1);
  init(seed);
}

template <class Scalar>
void Network<Scalar>::init(std::uint64_t seed) {
  NormalSource normal(seed);
  stem_.init(normal);
  for (Block& b : blocks_) {
    b.conv1.init(normal);
    b.conv2.init(normal);
  }
  policy_conv_.init(normal);
  main_fc_.init(normal);
  town_conv_.init(normal);
  town_fc_.init(normal);
  value_conv_.init(normal);
  value_fc1_.init(normal);
  value_fc2_.init(normal);
  for (Param<Scalar>* p : parameters()) {
    p->grad.setZero();
    p->velocity.setZero();
    if (!p->decay) p->value.setZero();
  }
  for (BatchNorm<Scalar>* n : norms()) {
    n->gamma.value.setOnes();
    n->running_mean.setZero();
    n->running_var.setOnes();
  }
  step_ = 0;
}

template <class Scalar>
std::vector<Param<Scalar>*> Network<Scalar>::parameters() {
  std::vector<Param<Scalar>*> out;
  auto norm = [&](BatchNorm<Scalar>& n) {
    out.push_back(&n.gamma);
    out.push_back(&n.beta);
  };
  out.push_back(&stem_.weight);
  norm(stem_bn_);
  for (Block& b : blocks_) {
    out.push_back(&b.conv1.weight);
    norm(b.bn1);
    out.push_back(&b.conv2.weight);
    norm(b.bn2);
  }
  out.push_back(&policy_conv_.weight);
  norm(policy_bn_);
  out.push_back(&main_fc_.weight);
  out.push_back(&main_fc_.bias);
  out.push_back(&town_conv_.weight);
  norm(town_bn_);
  out.push_back(&town_fc_.weight);
  out.push_back(&town_fc_.bias);
  out.push_back(&value_conv_.weight);
  norm(value_bn_);
  out.push_back(&value_fc1_.weight);
  out.push_back(&value_fc1_.bias);
  out.push_back(&value_fc2_.weight);
  out.push_back(&value_fc2_.bias);
  return out;
}

template <class Scalar>
std::vector<BatchNorm<Scalar>*> Network<Scalar>::norms() {
  std::vector<BatchNorm<Scalar>*> out{&stem_bn_};
  for (Block& b : blocks_) {
    out.push_back(&b.bn1);
    out.push_back(&b.bn2);
  }
  out.push_back(&policy_bn_);
  out.push_back(&town_bn_);
  out.push_back(&value_bn_);
  return out;
}

template <class Scalar>
std::int64_t Network<Scalar>::parameter_count() {
  std::int64_t n = 0;
  for (const Param<Scalar>* p : parameters()) n += p->value.size();
  return n;
}

template <class Scalar>
Output<Scalar> Network<Scalar>::forward(const Mat<Scalar>& x, Mode mode) {
  const int s = cfg_.input_rows * cfg_.input_cols;
  if (x.cols() != cfg_.input_layers || x.rows() == 0 || x.rows() % s != 0)
    throw std::invalid_argument("network input must be (B*" + std::to_string(s) + ") x " + std::to_string(cfg_.input_layers));
  const bool training = mode == Mode::Training;
  const int batch = static_cast<int>(x.rows() / s);
  const int h = cfg_.input_rows, w = cfg_.input_cols;
  batch_ = batch;

  stem_out_ = stem_bn_.forward(stem_.forward(x, batch, h, w), training);
  relu_inplace(stem_out_);
  const Mat<Scalar>* trunk = &stem_out_;
  for (Block& b : blocks_) {
    b.mid = b.bn1.forward(b.conv1.forward(*trunk, batch, h, w), training);
    relu_inplace(b.mid);
    b.out = b.bn2.forward(b.conv2.forward(b.mid, batch, h, w), training) + *trunk;
    relu_inplace(b.out);
    trunk = &b.out;
  }

  Output<Scalar> out;
  policy_out_ = policy_bn_.forward(policy_conv_.forward(*trunk, batch, h, w), training);
  relu_inplace(policy_out_);
  out.main = softmax_rows<Scalar>(main_fc_.forward(flatten(policy_out_, batch)));

  const int wh = policy_conv_.out_cols(w);
  town_out_ = town_bn_.forward(town_conv_.forward(policy_out_, batch, h, wh), training);
  relu_inplace(town_out_);
  out.town = softmax_rows<Scalar>(town_fc_.forward(flatten(town_out_, batch)));

  value_out_ = value_bn_.forward(value_conv_.forward(*trunk, batch, h, w), training);
  relu_inplace(value_out_);
  value_hidden_ = value_fc1_.forward(flatten(value_out_, batch));
  relu_inplace(value_hidden_);
  out.value = value_fc2_.forward(value_hidden_).col(0).array().tanh().matrix();
  return out;
}

template <class Scalar>
LossParts prediction_loss(const Output<Scalar>& out, const Batch<Scalar>& batch) {
  LossParts parts;
  const int n = batch.size();
  for (int i = 0; i < n; ++i) {
    const double d = static_cast<double>(batch.z(i)) - static_cast<double>(out.value(i));
    parts.value += d * d;
    parts.policy += cross_entropy(out.main, batch.pi_main, i);
    if (batch.town_valid(i) != 0) parts.town += static_cast<double>(batch.town_valid(i)) * cross_entropy(out.town, batch.pi_town, i);
  }
  parts.value /= n;
  parts.policy /= n;
  parts.town /= n;
  return parts;
}

template <class Scalar>
LossParts Network<Scalar>::loss_from(const Output<Scalar>& out, const Batch<Scalar>& batch) {
  LossParts parts = prediction_loss(out, batch);
  for (const Param<Scalar>* p : parameters()) {
    if (p->decay) parts.l2 += cfg_.l2 * p->value.template cast<double>().squaredNorm();
  }
  return parts;
}

template <class Scalar>
LossParts Network<Scalar>::loss(const Batch<Scalar>& batch, Mode mode) {
  return loss_from(forward(batch.x, mode), batch);
}

template <class Scalar>
LossParts Network<Scalar>::gradients(const Batch<Scalar>& batch) {
  for (Param<Scalar>* p : parameters()) p->grad.setZero();
  const Output<Scalar> out = forward(batch.x, Mode::Training);
  const LossParts parts = loss_from(out, batch);
  backward(out, batch);
  for (Param<Scalar>* p : parameters()) {
    if (p->decay) p->grad += static_cast<Scalar>(2.0 * cfg_.l2) * p->value;
  }
  return parts;
}

template <class Scalar>
void Network<Scalar>::backward(const Output<Scalar>& out, const Batch<Scalar>& batch) {
  const int n = batch_;
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);

  // Value head.
  Mat<Scalar> dv(n, 1);
  for (int i = 0; i < n; ++i) dv(i, 0) = -2 * (batch.z(i) - out.value(i)) * (1 - out.value(i) * out.value(i)) * inv_n;
  Mat<Scalar> d = relu_backward<Scalar>(value_fc2_.backward(dv), value_hidden_);
  d = unflatten<Scalar>(value_fc1_.backward(d), cfg_.value_filters);
  Mat<Scalar> dtrunk = value_conv_.backward(value_bn_.backward(relu_backward<Scalar>(d, value_out_)));

  // Town head.
  Mat<Scalar> dtown = cross_entropy_grad<Scalar>(out.town, batch.pi_town);
  for (int i = 0; i < n; ++i) dtown.row(i) *= batch.town_valid(i) * inv_n;
  d = unflatten<Scalar>(town_fc_.backward(dtown), 1);
  Mat<Scalar> dpolicy = town_conv_.backward(town_bn_.backward(relu_backward<Scalar>(d, town_out_)));

  // Main head.
  const Mat<Scalar> dmain = cross_entropy_grad<Scalar>(out.main, batch.pi_main) * inv_n;
  dpolicy += unflatten<Scalar>(main_fc_.backward(dmain), cfg_.policy_filters);
  dtrunk += policy_conv_.backward(policy_bn_.backward(relu_backward<Scalar>(dpolicy, policy_out_)));

  // Tower.
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    Block& b = *it;
    const Mat<Scalar> dsum = relu_backward<Scalar>(dtrunk, b.out);
    Mat<Scalar> dmid = b.conv2.backward(b.bn2.backward(dsum));
    dmid = relu_backward<Scalar>(dmid, b.mid);
    dtrunk = dsum + b.conv1.backward(b.bn1.backward(dmid));
  }
  stem_.backward(stem_bn_.backward(relu_backward<Scalar>(dtrunk, stem_out_)), false);
}

template <class Scalar>
LossParts Network<Scalar>::train_step(const Batch<Scalar>& batch) {
  return train_step(batch, cfg_.learning_rate);
}

template <class Scalar>
LossParts Network<Scalar>::train_step(const Batch<Scalar>& batch, double learning_rate) {
  const LossParts parts = gradients(batch);
  const Scalar mu = static_cast<Scalar>(cfg_.momentum);
  const Scalar lr = static_cast<Scalar>(learning_rate);
  for (Param<Scalar>* p : parameters()) {
    p->velocity = mu * p->velocity + p->grad;
    p->value -= lr * p->velocity;
  }
  ++step_;
  return parts;
}

template LossParts prediction_loss<float>(const Output<float>&, const Batch<float>&);
template LossParts prediction_loss<double>(const Output<double>&, const Batch<double>&);
template class Network<float>;
template class Network<double>;
template void write_input<float>(const encoding::StateTensor&, int, Mat<float>&);
template void write_input<double>(const encoding::StateTensor&, int, Mat<double>&);
template Mat<float> encode_inputs<float>(std::span<const GameState>);
template Mat<double> encode_inputs<double>(std::span<const GameState>);

}  // namespace terra::nn
