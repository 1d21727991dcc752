#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "dr/voxel_grid.hpp"

namespace dr::nn {

using Arr = Eigen::ArrayXd;
using Shape = std::vector<Index>;

inline Index numel(const Shape& s) {
    Index n = 1;
    for (Index d : s) n *= d;
    return n;
}

class Var;
using Tensor = std::shared_ptr<Var>;

/// Node of the dynamically built computation graph. Values and gradients
/// are dense double arrays; backward closures pull the node's gradient
/// into its parents. Creation order drives a deterministic topological
/// sweep in backward().
class Var {
public:
    Var(Shape shape, bool requires_grad);

    Shape shape;
    Arr val;
    Arr grad;
    bool requires_grad = false;
    std::uint64_t seq = 0;
    std::vector<Tensor> parents;
    std::function<void(Var&)> backward_fn;

    Index size() const { return val.size(); }
    void zero_grad() { if (requires_grad) grad.setZero(); }
    double scalar() const { return val[0]; }
};

Tensor make_tensor(Shape shape, bool requires_grad = false);
Tensor make_tensor(Shape shape, const Arr& values, bool requires_grad = false);

/// Leaf copy sharing values but cut off from the graph.
Tensor detach(const Tensor& t);

/// Reverse sweep from a scalar root; seed is the gradient at the root.
void backward(const Tensor& root, double seed = 1.0);

// Feature-map layout: shape {C, nx, ny, nz}, flat index
// x + nx*(y + ny*(z + nz*c)). 2D maps use nz = 1.
struct MapDims {
    Index c = 1, nx = 1, ny = 1, nz = 1;
    Index spatial() const { return nx * ny * nz; }
    Index total() const { return c * spatial(); }
};
MapDims map_dims(const Shape& s);

// Elementwise / reduction ops.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope = 0.2);
Tensor l1_loss(const Tensor& pred, const Tensor& gt);
Tensor mean_sq_err(const Tensor& a, double target);
Tensor tv_loss(const Tensor& a);
Tensor add_scalars(const std::vector<std::pair<double, Tensor>>& weighted);

/// Zero-padded "same" convolution, stride 1, odd kernel. Weights have
/// shape {C_out, C_in, k, k, k} (kz = 1 in 2D), bias {C_out}.
Tensor conv(const Tensor& input, const Tensor& weight, const Tensor& bias, int spatial_dims);

/// Non-overlapping average pooling by k along each active spatial axis.
Tensor avg_pool(const Tensor& input, int k);

/// Separable linear resize of each channel to the target spatial dims,
/// sharing kernels with the volume resampler (see dr/interp.hpp).
Tensor resize_linear(const Tensor& input, Dims3 target);

}  // namespace dr::nn
