#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace terra::nn {

struct NetworkConfig {
  int blocks = 19;
  int filters = 256;
  int policy_filters = 64;
  int value_filters = 32;
  int value_fc = 264;
  double l2 = 1e-4;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 128;

  // Input (rows, cols, layers); must match the encoding layout.
  int input_rows = 9;
  int input_cols = 26;
  int input_layers = 206;

  static NetworkConfig full() { return {}; }
  static NetworkConfig desk();

  /// Throws std::invalid_argument on non-positive sizes or an input shape
  /// that differs from the encoding layout.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct ParamShape {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool decay = false;  // subject to L2
};

/// Every trainable tensor in a fixed order.
std::vector<ParamShape> parameter_shapes(const NetworkConfig& cfg);

/// Closed form, with C = input layers, F = filters, P = policy filters,
/// V = value filters, H = value FC width, S = rows*cols, S' = rows*cols/2:
///   stem         9*C*F + 2F
///   blocks       blocks * 2 * (9*F*F + 2F)
///   policy trunk 2*F*P + 2P
///   main head    S'*P*2138 + 2138
///   town head    P + 2 + 5*S' + 5
///   value head   F*V + 2V + S*V*H + H + H + 1
std::int64_t parameter_count(const NetworkConfig& cfg);

}  // namespace terra::nn
