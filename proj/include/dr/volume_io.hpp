#pragma once

#include <string>
#include <variant>

#include "dr/voxel_grid.hpp"

namespace dr {

/// Sidecar keys: nx, ny, nz, depth, voxel_size_um, byte_order.
/// Raw payload is headerless, x fastest, little-endian for multi-byte
/// scalars; depth 32 marks float32 fields (porosity maps).
struct RawMeta {
    Dims3 dims{0, 0, 0};
    int depth = 8;
    double voxel_size_um = 1.0;
    std::string byte_order = "little";
};

RawMeta parse_sidecar(const std::string& meta_path);
void write_sidecar(const std::string& meta_path, const RawMeta& meta);

GridU8 load_raw_u8(const std::string& path, const std::string& meta_path);
GridU16 load_raw_u16(const std::string& path, const std::string& meta_path);
GridF32 load_raw_f32(const std::string& path, const std::string& meta_path);

void save_raw(const GridU8& g, const std::string& path, const std::string& meta_path);
void save_raw(const GridU16& g, const std::string& path, const std::string& meta_path);
void save_raw(const GridF32& g, const std::string& path, const std::string& meta_path);

using AnyGrid = std::variant<GridU8, GridU16, GridF32>;
AnyGrid load_raw_any(const std::string& path, const std::string& meta_path);

}  // namespace dr
