#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "wvdnet/network.hpp"

namespace wvdnet {

inline constexpr char kCheckpointMagic[4] = {'W', 'V', 'D', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, all integers little-endian:
//   "WVDN"  u32 version
//   config: u32 channels, u32 rows, u32 cols, u32 num_classes, u64 seed,
//           u32 n_names, { u32 len, bytes }*, u32 n_layers,
//           { u8 kind, u32 in_channels, u32 out_channels, u32 kernel, u32 stride,
//             u32 padding, u32 in_features, u32 out_features, f64 p }*
//   u32 n_tensors, { u32 rank, u32 dims[rank], f32 data[prod(dims)] }*
// Tensors follow layer declaration order (weight before bias).
std::string serialize_checkpoint(Network<float>& net);
Network<float> deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(Network<float>& net, const std::filesystem::path& path);
Network<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace wvdnet
