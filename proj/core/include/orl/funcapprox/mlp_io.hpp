#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "orl/funcapprox/mlp.hpp"

namespace orl {

/// Flat binary model format, little-endian:
///   magic "ORLMLP\0\0" | u32 version | u32 layer-size count | u32 sizes...
///   then per layer: weights row-major (out x in) f64, biases f64.
inline constexpr std::uint32_t kMlpFormatVersion = 1;

std::string serialize_mlp(const Mlp& model);
Mlp deserialize_mlp(const std::string& bytes);

void save_mlp(const std::filesystem::path& path, const Mlp& model);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace orl
