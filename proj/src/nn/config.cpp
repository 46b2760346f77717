#include "terra/nn/config.hpp"

#include <stdexcept>

#include "terra/encoding/codec.hpp"

namespace terra::nn {

NetworkConfig NetworkConfig::desk() {
  NetworkConfig c;
  c.blocks = 2;
  c.filters = 32;
  c.policy_filters = 4;
  c.value_filters = 2;
  c.value_fc = 64;
  c.batch_size = 32;
  return c;
}

void NetworkConfig::validate() const {
  if (blocks < 0 || filters <= 0 || policy_filters <= 0 || value_filters <= 0 || value_fc <= 0)
    throw std::invalid_argument("network sizes must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  if (l2 < 0 || learning_rate < 0 || momentum < 0 || momentum >= 1)
    throw std::invalid_argument("bad optimizer settings");
  if (input_rows != encoding::kBoardRows || input_cols != encoding::kBoardCols ||
      input_layers != encoding::kNumLayers)
    throw std::invalid_argument("input shape does not match the encoding layout");
}

std::vector<ParamShape> parameter_shapes(const NetworkConfig& c) {
  const int f = c.filters;
  const int s = c.input_rows * c.input_cols;
  const int half = c.input_rows * (c.input_cols / 2);
  std::vector<ParamShape> out;
  auto norm = [&](const std::string& name, int ch) {
    out.push_back({name + ".gamma", 1, ch, false});
    out.push_back({name + ".beta", 1, ch, false});
  };
  out.push_back({"stem.conv", 9 * c.input_layers, f, true});
  norm("stem.bn", f);
  for (int b = 0; b < c.blocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    out.push_back({p + ".conv1", 9 * f, f, true});
    norm(p + ".bn1", f);
    out.push_back({p + ".conv2", 9 * f, f, true});
    norm(p + ".bn2", f);
  }
  out.push_back({"policy.conv", 2 * f, c.policy_filters, true});
  norm("policy.bn", c.policy_filters);
  out.push_back({"main.fc.w", half * c.policy_filters, encoding::kNumMainActions, true});
  out.push_back({"main.fc.b", 1, encoding::kNumMainActions, false});
  out.push_back({"town.conv", c.policy_filters, 1, true});
  norm("town.bn", 1);
  out.push_back({"town.fc.w", half, encoding::kNumTownActions, true});
  out.push_back({"town.fc.b", 1, encoding::kNumTownActions, false});
  out.push_back({"value.conv", f, c.value_filters, true});
  norm("value.bn", c.value_filters);
  out.push_back({"value.fc1.w", s * c.value_filters, c.value_fc, true});
  out.push_back({"value.fc1.b", 1, c.value_fc, false});
  out.push_back({"value.fc2.w", c.value_fc, 1, true});
  out.push_back({"value.fc2.b", 1, 1, false});
  return out;
}

std::int64_t parameter_count(const NetworkConfig& c) {
  const std::int64_t C = c.input_layers, F = c.filters, P = c.policy_filters, V = c.value_filters, H = c.value_fc;
  const std::int64_t S = c.input_rows * c.input_cols;
  const std::int64_t half = c.input_rows * (c.input_cols / 2);
  const std::int64_t A = encoding::kNumMainActions;
  const std::int64_t T = encoding::kNumTownActions;
  return (9 * C * F + 2 * F) + c.blocks * 2 * (9 * F * F + 2 * F) + (2 * F * P + 2 * P) + (half * P * A + A) +
         (P + 2 + T * half + T) + (F * V + 2 * V + S * V * H + H + H + 1);
}

}  // namespace terra::nn
