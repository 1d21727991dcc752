#pragma once

#include <string>
#include <vector>

#include "dr/nn/tensor.hpp"
#include "dr/rng.hpp"

namespace dr::nn {

struct ConvLayer {
    Tensor weight;  // {C_out, C_in, kx, ky, kz}
    Tensor bias;    // {C_out}
    int spatial_dims = 3;

    Tensor operator()(const Tensor& x) const { return conv(x, weight, bias, spatial_dims); }
};

ConvLayer make_conv(Index c_out, Index c_in, int kernel, int spatial_dims, Rng& rng,
                    bool tracked = true);

/// EDSR configuration. Filters default to the reduced width of 32; the
/// block count is configurable because toy runs use far fewer.
struct EdsrConfig {
    int dims = 3;             // 2 or 3
    int filters = 32;
    int residual_blocks = 8;
    int scale = 4;
    int kernel = 3;

    void validate() const;
    bool operator==(const EdsrConfig&) const = default;
};

/// Head conv -> residual blocks (conv-ReLU-conv + skip) -> linear
/// upsample of the features -> tail conv, plus a global skip that adds
/// the linearly upsampled input. All-zero weights therefore reduce the
/// network to the plain trilinear (bilinear in 2D) upsampler.
struct EdsrNet {
    EdsrConfig cfg;
    ConvLayer head;
    std::vector<std::pair<ConvLayer, ConvLayer>> blocks;
    ConvLayer tail;

    Tensor forward(const Tensor& x) const;
    std::vector<Tensor> params() const;
    void set_tracked(bool tracked);
};

EdsrNet make_edsr(const EdsrConfig& cfg, Rng& rng);

/// Same-size translation net (G1, G2 of the CycleGANs): head conv,
/// residual blocks, tail conv, plus a global input skip so the zero
/// network is the identity map.
struct TranslatorConfig {
    int dims = 2;
    int filters = 16;
    int residual_blocks = 2;
    int kernel = 3;
    int down_scale = 1;  // > 1 turns the net into a downscaling generator (G3)

    bool operator==(const TranslatorConfig&) const = default;
};

struct TranslatorNet {
    TranslatorConfig cfg;
    ConvLayer head;
    std::vector<std::pair<ConvLayer, ConvLayer>> blocks;
    ConvLayer tail;

    Tensor forward(const Tensor& x) const;
    std::vector<Tensor> params() const;
    void set_tracked(bool tracked);
};

TranslatorNet make_translator(const TranslatorConfig& cfg, Rng& rng);

/// Patch discriminator for the least-squares GAN objective: conv +
/// leaky-ReLU stacks with average-pool downsampling, 1-channel output map.
struct DiscriminatorConfig {
    int dims = 2;
    int filters = 16;
    int levels = 2;  // number of pool-by-2 stages
    int kernel = 3;

    bool operator==(const DiscriminatorConfig&) const = default;
};

struct DiscriminatorNet {
    DiscriminatorConfig cfg;
    std::vector<ConvLayer> convs;
    ConvLayer final;

    Tensor forward(const Tensor& x) const;
    std::vector<Tensor> params() const;
    void set_tracked(bool tracked);
};

DiscriminatorNet make_discriminator(const DiscriminatorConfig& cfg, Rng& rng);

/// Deep copies: fresh parameter tensors with the same values. Plain
/// struct copies share parameters (Tensor is a shared_ptr).
EdsrNet clone(const EdsrNet& net);
TranslatorNet clone(const TranslatorNet& net);
DiscriminatorNet clone(const DiscriminatorNet& net);

/// Grid <-> tensor conversion on the raw 0..255 intensity scale; u8
/// output rounds half-up after clamping.
Tensor tensor_from_grid(const GridU8& g);
GridU8 grid_from_tensor(const Tensor& t, double voxel_size);

}  // namespace dr::nn
