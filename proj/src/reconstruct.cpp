#include "dr/reconstruct.hpp"

#include <cmath>
#include <stdexcept>

namespace dr::recon {

Upsampler Upsampler::trilinear(int scale) {
    Upsampler u;
    u.kind = UpsamplerKind::Trilinear;
    u.scale = scale;
    return u;
}

Upsampler Upsampler::bicubic(int scale) {
    Upsampler u;
    u.kind = UpsamplerKind::Bicubic;
    u.scale = scale;
    return u;
}

Upsampler Upsampler::edsr_net(nn::EdsrNet net) {
    Upsampler u;
    u.kind = UpsamplerKind::EdsrNet;
    u.scale = net.cfg.scale;
    u.edsr = std::move(net);
    return u;
}

Upsampler Upsampler::cincgan_chain(nn::TranslatorNet g1, nn::EdsrNet edsr2d) {
    Upsampler u;
    u.kind = UpsamplerKind::CincganChain;
    u.scale = edsr2d.cfg.scale;
    u.g1 = std::move(g1);
    u.edsr = std::move(edsr2d);
    return u;
}

void Upsampler::validate() const {
    if (scale < 1) throw std::invalid_argument("Upsampler: scale must be >= 1");
    if (kind == UpsamplerKind::EdsrNet) {
        if (!edsr) throw std::invalid_argument("Upsampler: missing EDSR network");
        if (edsr->cfg.scale != scale)
            throw std::invalid_argument("Upsampler: network scale does not match");
    }
    if (kind == UpsamplerKind::CincganChain) {
        if (!edsr || !g1) throw std::invalid_argument("Upsampler: chain needs G1 and EDSR");
        if (edsr->cfg.dims != 2 || g1->cfg.dims != 2)
            throw std::invalid_argument("Upsampler: chain networks must be 2D");
        if (g1->cfg.down_scale != 1)
            throw std::invalid_argument("Upsampler: G1 must be same-size");
        if (edsr->cfg.scale != scale)
            throw std::invalid_argument("Upsampler: network scale does not match");
    }
}

GridU8 Upsampler::apply(const GridU8& lr) const {
    validate();
    const double s = static_cast<double>(scale);
    switch (kind) {
        case UpsamplerKind::Trilinear:
            return resample(lr, s, ResampleMethod::Trilinear);
        case UpsamplerKind::Bicubic:
            return resample(lr, s, ResampleMethod::BicubicSlices);
        case UpsamplerKind::EdsrNet: {
            nn::Tensor y = edsr->forward(nn::tensor_from_grid(lr));
            return nn::grid_from_tensor(y, lr.voxel_size() / s);
        }
        case UpsamplerKind::CincganChain:
            return cincgan_reconstruct_2d3d(lr, *g1, *edsr);
    }
    throw std::logic_error("Upsampler: unreachable");
}

GridU8 sr_reconstruct_tiled(const GridU8& lr, const Upsampler& up, Index slab_thickness,
                            Index overlap) {
    up.validate();
    if (slab_thickness < 1)
        throw std::invalid_argument("sr_reconstruct_tiled: slab thickness must be >= 1");
    if (overlap < 0) throw std::invalid_argument("sr_reconstruct_tiled: negative overlap");
    if (lr.empty()) throw std::invalid_argument("sr_reconstruct_tiled: empty volume");

    const Index s = up.scale;
    const bool analytic =
        up.kind == UpsamplerKind::Trilinear || up.kind == UpsamplerKind::Bicubic;
    // Linear/cubic kernels in z need one source slice beyond the slab to
    // reproduce the whole-volume result exactly.
    const Index halo = analytic ? 1 : overlap;

    std::vector<GridU8> pieces;
    for (Index z0 = 0; z0 < lr.nz(); z0 += slab_thickness) {
        Index z1 = std::min(z0 + slab_thickness, lr.nz());
        Index lo = std::min(halo, z0);
        Index hi = std::min(halo, lr.nz() - z1);
        GridU8 slab = crop(lr, Region{{0, 0, z0 - lo}, {lr.nx(), lr.ny(), z1 - z0 + lo + hi}});
        GridU8 rec = up.apply(slab);
        pieces.push_back(crop(rec, Region{{0, 0, lo * s}, {rec.nx(), rec.ny(), (z1 - z0) * s}}));
    }

    Dims3 out_dims{lr.nx() * s, lr.ny() * s, lr.nz() * s};
    GridU8 out(out_dims, lr.voxel_size() / static_cast<double>(s));
    Index z_off = 0;
    for (const auto& p : pieces) {
        for (Index z = 0; z < p.nz(); ++z)
            for (Index y = 0; y < p.ny(); ++y)
                for (Index x = 0; x < p.nx(); ++x) out(x, y, z_off + z) = p(x, y, z);
        z_off += p.nz();
    }
    return out;
}

GridU8 cincgan_reconstruct_2d3d(const GridU8& lr, const nn::TranslatorNet& g1,
                                const nn::EdsrNet& edsr2d) {
    if (g1.cfg.dims != 2 || edsr2d.cfg.dims != 2)
        throw std::invalid_argument("cincgan_reconstruct_2d3d: networks must be 2D");
    if (g1.cfg.down_scale != 1)
        throw std::invalid_argument("cincgan_reconstruct_2d3d: G1 must be same-size");
    if (lr.empty()) throw std::invalid_argument("cincgan_reconstruct_2d3d: empty volume");
    const Index s = edsr2d.cfg.scale;

    // Step 1: XY slices through the G1 + EDSR chain.
    std::vector<GridU8> sr_xy;
    for (const GridU8& slice : reslice(lr, Plane::XY)) {
        nn::Tensor t = nn::tensor_from_grid(slice);
        nn::Tensor y = edsr2d.forward(g1.forward(t));
        sr_xy.push_back(nn::grid_from_tensor(y, slice.voxel_size()));
    }
    GridU8 vol_xy = stack(sr_xy, Plane::XY);  // (s*nx, s*ny, nz)

    // Step 2: bicubic x-downsample of the XZ slices back to LR scale.
    // Step 3: each XZ image through EDSR to the final volume.
    std::vector<GridU8> sr_xz;
    for (const GridU8& slice : reslice(vol_xy, Plane::XZ)) {
        GridU8 down = resample_aniso(slice, 1.0 / static_cast<double>(s), 1.0, 1.0,
                                     ResampleMethod::BicubicSlices);
        nn::Tensor y = edsr2d.forward(nn::tensor_from_grid(down));
        sr_xz.push_back(nn::grid_from_tensor(y, slice.voxel_size()));
    }
    GridU8 out = stack(sr_xz, Plane::XZ);
    out.set_voxel_size(lr.voxel_size() / static_cast<double>(s));
    return out;
}

std::vector<SeamStat> boundary_artifact_report(const GridU8& sr, Index slab_thickness,
                                               int scale) {
    if (slab_thickness < 1 || scale < 1)
        throw std::invalid_argument("boundary_artifact_report: bad slab geometry");
    if (sr.nz() < 2) return {};
    const Index seam_period = slab_thickness * scale;

    auto slice_jump = [&](Index z) {
        double acc = 0.0;
        for (Index y = 0; y < sr.ny(); ++y)
            for (Index x = 0; x < sr.nx(); ++x)
                acc += std::abs(static_cast<double>(sr(x, y, z)) -
                                static_cast<double>(sr(x, y, z + 1)));
        return acc / static_cast<double>(sr.nx() * sr.ny());
    };

    double baseline = 0.0;
    for (Index z = 0; z + 1 < sr.nz(); ++z) baseline += slice_jump(z);
    baseline /= static_cast<double>(sr.nz() - 1);

    std::vector<SeamStat> report;
    for (Index z = seam_period - 1; z + 1 < sr.nz(); z += seam_period) {
        SeamStat st;
        st.z = z;
        st.jump = slice_jump(z);
        st.baseline = baseline;
        st.ratio = baseline > 0.0
                       ? st.jump / baseline
                       : (st.jump == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        report.push_back(st);
    }
    return report;
}

}  // namespace dr::recon
