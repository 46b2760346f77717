#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "terra/nn/network.hpp"

namespace terra::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hash of the encoding layout and the parameter shapes of `cfg`.
std::uint64_t checkpoint_layout_hash(const NetworkConfig& cfg);

/// Binary file: magic, layout hash, scalar width, config, step, then every
/// parameter with its momentum buffer and every batch-norm running statistic.
/// Written to a temporary file and renamed into place.
template <class Scalar>
void save_checkpoint(Network<Scalar>& net, const std::filesystem::path& path);

/// Throws CheckpointError on a bad magic, layout hash, scalar width or size.
template <class Scalar>
Network<Scalar> load_checkpoint(const std::filesystem::path& path);

NetworkConfig checkpoint_config(const std::filesystem::path& path);

}  // namespace terra::nn
