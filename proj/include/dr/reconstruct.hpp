#pragma once

#include <optional>
#include <vector>

#include "dr/nn/layers.hpp"
#include "dr/volume.hpp"

namespace dr::recon {

enum class UpsamplerKind { Trilinear, Bicubic, EdsrNet, CincganChain };

/// A scale-factor upsampler: analytic kernel or attached network(s).
/// The CinCGAN chain pairs a 2D cleaning generator with a 2D EDSR.
struct Upsampler {
    UpsamplerKind kind = UpsamplerKind::Trilinear;
    int scale = 4;
    std::optional<nn::EdsrNet> edsr;       // 3D net, or the 2D stage of the chain
    std::optional<nn::TranslatorNet> g1;   // chain only

    static Upsampler trilinear(int scale);
    static Upsampler bicubic(int scale);
    static Upsampler edsr_net(nn::EdsrNet net);
    static Upsampler cincgan_chain(nn::TranslatorNet g1, nn::EdsrNet edsr2d);

    void validate() const;
    GridU8 apply(const GridU8& lr) const;
};

/// Z-slab tiled reconstruction. Analytic kernels fetch the exact halo
/// their support needs, so they match the whole-volume resample
/// bit-for-bit; networks see bare slabs (overlap 0 reproduces the
/// zero-padding seam artifacts, overlap > 0 trims them away).
GridU8 sr_reconstruct_tiled(const GridU8& lr, const Upsampler& up, Index slab_thickness,
                            Index overlap = 0);

/// Three-step 2D CinCGAN workflow: XY slices through G1 + EDSR, bicubic
/// x-downsample of the stacked volume's XZ slices, then the XZ slices
/// through EDSR again to the final 3D volume.
GridU8 cincgan_reconstruct_2d3d(const GridU8& lr, const nn::TranslatorNet& g1,
                                const nn::EdsrNet& edsr2d);

struct SeamStat {
    Index z = 0;          // output slice index left of the seam
    double jump = 0.0;    // mean |I(z) - I(z+1)| across the seam
    double baseline = 0.0;
    double ratio = 0.0;
};

/// Per-seam mean absolute jump against the volume-wide adjacent-slice
/// baseline. Single-slab reconstructions yield an empty report.
std::vector<SeamStat> boundary_artifact_report(const GridU8& sr, Index slab_thickness,
                                               int scale);

}  // namespace dr::recon
