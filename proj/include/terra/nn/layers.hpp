#pragma once

// Dense layers over row-major activations: one row per (sample, row, col)
// position, one column per channel.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

namespace terra::nn {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Standard normal draws built only from mt19937_64 output, so initial
/// weights are identical across standard libraries.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <class Scalar>
struct Param {
  std::string name;
  Mat<Scalar> value;
  Mat<Scalar> grad;
  Mat<Scalar> velocity;
  bool decay = false;

  void resize(int rows, int cols) {
    value = Mat<Scalar>::Zero(rows, cols);
    grad = Mat<Scalar>::Zero(rows, cols);
    velocity = Mat<Scalar>::Zero(rows, cols);
  }
};

struct ConvGeometry {
  int kh = 3, kw = 3;
  int sh = 1, sw = 1;
  int ph = 1, pw = 1;

  int out_rows(int h) const { return (h + 2 * ph - kh) / sh + 1; }
  int out_cols(int w) const { return (w + 2 * pw - kw) / sw + 1; }
};

/// Bias-free convolution (a batch norm always follows). Weight rows are
/// ordered (ky, kx, input channel).
template <class Scalar>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, int in_channels, int out_channels, ConvGeometry g)
      : in_(in_channels), out_(out_channels), g_(g) {
    weight.name = std::move(name);
    weight.decay = true;
    weight.resize(g.kh * g.kw * in_channels, out_channels);
  }

  void init(NormalSource& normal) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(weight.value.rows()));
    for (Eigen::Index i = 0; i < weight.value.size(); ++i) weight.value.data()[i] = static_cast<Scalar>(stddev * normal());
  }

  int out_rows(int h) const { return g_.out_rows(h); }
  int out_cols(int w) const { return g_.out_cols(w); }

  Mat<Scalar> forward(const Mat<Scalar>& x, int batch, int h, int w) {
    check_input(x, batch, h, w);
    x_ = x;
    batch_ = batch;
    h_ = h;
    w_ = w;
    const int ho = out_rows(h), wo = out_cols(w);
    Mat<Scalar> y(static_cast<Eigen::Index>(batch) * ho * wo, out_);
    if (pointwise()) {
      y.noalias() = x * weight.value;
      return y;
    }
    const int chunk = chunk_samples(ho * wo);
    for (int b0 = 0; b0 < batch; b0 += chunk) {
      const int nb = std::min(chunk, batch - b0);
      const Mat<Scalar> col = im2col(b0, nb);
      y.middleRows(static_cast<Eigen::Index>(b0) * ho * wo, col.rows()).noalias() = col * weight.value;
    }
    return y;
  }

  /// Accumulates the weight gradient; returns the input gradient when asked.
  Mat<Scalar> backward(const Mat<Scalar>& dy, bool want_input_grad = true) {
    const int ho = out_rows(h_), wo = out_cols(w_);
    if (pointwise()) {
      weight.grad.noalias() += x_.transpose() * dy;
      if (!want_input_grad) return {};
      return dy * weight.value.transpose();
    }
    Mat<Scalar> dx;
    if (want_input_grad) dx = Mat<Scalar>::Zero(x_.rows(), in_);
    const int chunk = chunk_samples(ho * wo);
    for (int b0 = 0; b0 < batch_; b0 += chunk) {
      const int nb = std::min(chunk, batch_ - b0);
      const Mat<Scalar> col = im2col(b0, nb);
      const auto dy_chunk = dy.middleRows(static_cast<Eigen::Index>(b0) * ho * wo, col.rows());
      weight.grad.noalias() += col.transpose() * dy_chunk;
      if (want_input_grad) {
        const Mat<Scalar> dcol = dy_chunk * weight.value.transpose();
        col2im(dcol, b0, nb, dx);
      }
    }
    return dx;
  }

  Param<Scalar> weight;

 private:
  bool pointwise() const { return g_.kh == 1 && g_.kw == 1 && g_.sh == 1 && g_.sw == 1 && g_.ph == 0 && g_.pw == 0; }

  void check_input(const Mat<Scalar>& x, int batch, int h, int w) const {
    if (x.cols() != in_ || x.rows() != static_cast<Eigen::Index>(batch) * h * w)
      throw std::invalid_argument(weight.name + ": input shape mismatch");
  }

  // Samples per im2col chunk, keeping the column buffer near 4M entries.
  int chunk_samples(int positions) const {
    const std::int64_t per = static_cast<std::int64_t>(positions) * g_.kh * g_.kw * in_;
    return static_cast<int>(std::max<std::int64_t>(1, (std::int64_t{1} << 22) / per));
  }

  template <class Fn>
  void for_each_tap(int b0, int nb, Fn fn) const {
    const int ho = out_rows(h_), wo = out_cols(w_);
    for (int b = 0; b < nb; ++b) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          const Eigen::Index row = (static_cast<Eigen::Index>(b) * ho + oy) * wo + ox;
          for (int ky = 0; ky < g_.kh; ++ky) {
            const int iy = oy * g_.sh - g_.ph + ky;
            if (iy < 0 || iy >= h_) continue;
            for (int kx = 0; kx < g_.kw; ++kx) {
              const int ix = ox * g_.sw - g_.pw + kx;
              if (ix < 0 || ix >= w_) continue;
              const Eigen::Index src = (static_cast<Eigen::Index>(b0 + b) * h_ + iy) * w_ + ix;
              fn(row, (ky * g_.kw + kx) * in_, src);
            }
          }
        }
      }
    }
  }

  Mat<Scalar> im2col(int b0, int nb) const {
    const int ho = out_rows(h_), wo = out_cols(w_);
    Mat<Scalar> col = Mat<Scalar>::Zero(static_cast<Eigen::Index>(nb) * ho * wo, g_.kh * g_.kw * in_);
    for_each_tap(b0, nb, [&](Eigen::Index row, int offset, Eigen::Index src) {
      std::memcpy(col.row(row).data() + offset, x_.row(src).data(), sizeof(Scalar) * in_);
    });
    return col;
  }

  void col2im(const Mat<Scalar>& dcol, int b0, int nb, Mat<Scalar>& dx) const {
    for_each_tap(b0, nb, [&](Eigen::Index row, int offset, Eigen::Index src) {
      dx.row(src) += dcol.row(row).segment(offset, in_);
    });
  }

  int in_ = 0, out_ = 0;
  ConvGeometry g_;
  Mat<Scalar> x_;
  int batch_ = 0, h_ = 0, w_ = 0;
};

/// Per-channel batch normalization over all rows.
template <class Scalar>
class BatchNorm {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kRunningMomentum = 0.1;

  BatchNorm() = default;
  BatchNorm(const std::string& name, int channels) {
    gamma.name = name + ".gamma";
    beta.name = name + ".beta";
    gamma.resize(1, channels);
    beta.resize(1, channels);
    gamma.value.setOnes();
    running_mean = RowVec<Scalar>::Zero(channels);
    running_var = RowVec<Scalar>::Ones(channels);
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, bool training) {
    RowVec<Scalar> mean, var;
    if (training) {
      mean = x.colwise().mean();
      var = (x.rowwise() - mean).array().square().colwise().mean().matrix();
      const Scalar m = static_cast<Scalar>(kRunningMomentum);
      running_mean = (1 - m) * running_mean + m * mean;
      running_var = (1 - m) * running_var + m * var;
    } else {
      mean = running_mean;
      var = running_var;
    }
    inv_std_ = (var.array() + static_cast<Scalar>(kEpsilon)).rsqrt().matrix();
    xhat_ = ((x.rowwise() - mean).array().rowwise() * inv_std_.array()).matrix();
    return ((xhat_.array().rowwise() * gamma.value.row(0).array()).rowwise() + beta.value.row(0).array()).matrix();
  }

  /// Valid after a training-mode forward.
  Mat<Scalar> backward(const Mat<Scalar>& dy) {
    const Scalar n = static_cast<Scalar>(dy.rows());
    beta.grad.row(0) += dy.colwise().sum();
    gamma.grad.row(0) += (dy.array() * xhat_.array()).colwise().sum().matrix();
    const Mat<Scalar> dxhat = (dy.array().rowwise() * gamma.value.row(0).array()).matrix();
    const RowVec<Scalar> sum = dxhat.colwise().sum();
    const RowVec<Scalar> dot = (dxhat.array() * xhat_.array()).colwise().sum().matrix();
    Mat<Scalar> dx = ((n * dxhat.array()).rowwise() - sum.array()).matrix();
    dx -= (xhat_.array().rowwise() * dot.array()).matrix();
    return (dx.array().rowwise() * (inv_std_.array() / n)).matrix();
  }

  Param<Scalar> gamma;
  Param<Scalar> beta;
  RowVec<Scalar> running_mean;
  RowVec<Scalar> running_var;

 private:
  Mat<Scalar> xhat_;
  RowVec<Scalar> inv_std_;
};

template <class Scalar>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out) {
    weight.name = name + ".w";
    bias.name = name + ".b";
    weight.decay = true;
    weight.resize(in, out);
    bias.resize(1, out);
  }

  void init(NormalSource& normal) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(weight.value.rows()));
    for (Eigen::Index i = 0; i < weight.value.size(); ++i) weight.value.data()[i] = static_cast<Scalar>(stddev * normal());
  }

  Mat<Scalar> forward(const Mat<Scalar>& x) {
    if (x.cols() != weight.value.rows()) throw std::invalid_argument(weight.name + ": input shape mismatch");
    x_ = x;
    Mat<Scalar> y = x * weight.value;
    y.rowwise() += bias.value.row(0);
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy) {
    weight.grad.noalias() += x_.transpose() * dy;
    bias.grad.row(0) += dy.colwise().sum();
    return dy * weight.value.transpose();
  }

  Param<Scalar> weight;
  Param<Scalar> bias;

 private:
  Mat<Scalar> x_;
};

template <class Scalar>
void relu_inplace(Mat<Scalar>& x) {
  x = x.cwiseMax(Scalar(0));
}

/// Gradient through a ReLU given its output.
template <class Scalar>
Mat<Scalar> relu_backward(const Mat<Scalar>& dy, const Mat<Scalar>& out) {
  return (out.array() > Scalar(0)).select(dy, Mat<Scalar>::Zero(dy.rows(), dy.cols()));
}

/// Row-wise softmax.
template <class Scalar>
Mat<Scalar> softmax_rows(const Mat<Scalar>& logits) {
  Mat<Scalar> p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  const Vec<Scalar> sums = p.rowwise().sum();
  for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= sums(r);
  return p;
}

}  // namespace terra::nn
