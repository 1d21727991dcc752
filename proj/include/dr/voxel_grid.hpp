#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace dr {

using Index = std::int64_t;
using Dims3 = std::array<Index, 3>;

inline Index volume_of(const Dims3& d) { return d[0] * d[1] * d[2]; }

template <typename T>
struct voxel_depth;
template <>
struct voxel_depth<std::uint8_t> : std::integral_constant<int, 8> {};
template <>
struct voxel_depth<std::uint16_t> : std::integral_constant<int, 16> {};
template <>
struct voxel_depth<float> : std::integral_constant<int, 32> {};

/// Dense 3D scalar image, row-major with x fastest. Voxel size is the
/// physical edge length in micrometres. The scalar type fixes the bit
/// depth (u8 -> 8, u16 -> 16, float -> 32 for derived fields).
template <typename T>
class VoxelGrid {
public:
    VoxelGrid() : dims_{0, 0, 0}, voxel_size_(1.0) {}

    VoxelGrid(Dims3 dims, double voxel_size_um = 1.0, T fill = T{})
        : dims_(dims), voxel_size_(voxel_size_um),
          data_(static_cast<std::size_t>(check_dims(dims, voxel_size_um)), fill) {}

    VoxelGrid(Dims3 dims, double voxel_size_um, std::vector<T> data)
        : dims_(dims), voxel_size_(voxel_size_um), data_(std::move(data)) {
        if (static_cast<Index>(data_.size()) != check_dims(dims, voxel_size_um))
            throw std::invalid_argument("VoxelGrid: data length does not match dims");
    }

    const Dims3& dims() const { return dims_; }
    Index nx() const { return dims_[0]; }
    Index ny() const { return dims_[1]; }
    Index nz() const { return dims_[2]; }
    Index size() const { return static_cast<Index>(data_.size()); }
    bool empty() const { return data_.empty(); }
    double voxel_size() const { return voxel_size_; }
    void set_voxel_size(double um) {
        if (!(um > 0.0)) throw std::invalid_argument("VoxelGrid: voxel size must be > 0");
        voxel_size_ = um;
    }
    static constexpr int depth() { return voxel_depth<T>::value; }

    Index index(Index x, Index y, Index z) const { return x + dims_[0] * (y + dims_[1] * z); }

    T operator()(Index x, Index y, Index z) const { return data_[static_cast<std::size_t>(index(x, y, z))]; }
    T& operator()(Index x, Index y, Index z) { return data_[static_cast<std::size_t>(index(x, y, z))]; }

    T at(Index x, Index y, Index z) const {
        if (!contains(x, y, z)) throw std::out_of_range("VoxelGrid: voxel index out of range");
        return (*this)(x, y, z);
    }

    bool contains(Index x, Index y, Index z) const {
        return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
    }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    template <typename U>
    bool same_shape(const VoxelGrid<U>& o) const { return dims_ == o.dims(); }

    bool operator==(const VoxelGrid& o) const {
        return dims_ == o.dims_ && voxel_size_ == o.voxel_size_ && data_ == o.data_;
    }

private:
    static Index check_dims(const Dims3& dims, double voxel_size_um) {
        for (Index n : dims)
            if (n < 0) throw std::invalid_argument("VoxelGrid: negative dimension");
        if (!(voxel_size_um > 0.0)) throw std::invalid_argument("VoxelGrid: voxel size must be > 0");
        return volume_of(dims);
    }

    Dims3 dims_;
    double voxel_size_;
    std::vector<T> data_;
};

using GridU8 = VoxelGrid<std::uint8_t>;
using GridU16 = VoxelGrid<std::uint16_t>;
using GridF32 = VoxelGrid<float>;

/// Axis-aligned sub-box of a parent grid, in voxel indices.
struct Region {
    Dims3 origin{0, 0, 0};
    Dims3 shape{0, 0, 0};

    template <typename T>
    bool fits(const VoxelGrid<T>& g) const {
        for (int a = 0; a < 3; ++a) {
            if (origin[a] < 0 || shape[a] <= 0) return false;
            if (origin[a] + shape[a] > g.dims()[a]) return false;
        }
        return true;
    }
};

}  // namespace dr
