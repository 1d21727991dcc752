#include "dr/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dr::poro {

PorosityMap local_porosity_map(const GridU8& grid, const seg::LabelGrid& labels,
                               const seg::ThresholdPair& thresholds) {
    if (!grid.same_shape(labels))
        throw std::invalid_argument("local_porosity_map: grid/labels shape mismatch");
    if (thresholds.pore_max == thresholds.grain_min)
        throw std::invalid_argument("local_porosity_map: T_pore equals T_grain");
    const double t_pore = thresholds.pore_max;
    const double t_grain = thresholds.grain_min;
    PorosityMap out(grid.dims(), grid.voxel_size());
    for (Index i = 0; i < grid.size(); ++i) {
        if (labels.data()[static_cast<std::size_t>(i)] != seg::GRAIN) continue;
        double t = static_cast<double>(grid.data()[static_cast<std::size_t>(i)]);
        double phi = (t - t_grain) / (t_pore - t_grain);
        out.data()[static_cast<std::size_t>(i)] = static_cast<float>(std::clamp(phi, 0.0, 1.0));
    }
    return out;
}

PorositySummary porosity_summary(const seg::LabelGrid& labels, const PorosityMap& pmap) {
    if (!labels.same_shape(pmap))
        throw std::invalid_argument("porosity_summary: shape mismatch");
    if (labels.empty()) throw std::invalid_argument("porosity_summary: empty volume");
    std::uint64_t pore = 0;
    double micro_sum = 0.0;
    for (Index i = 0; i < labels.size(); ++i) {
        if (labels.data()[static_cast<std::size_t>(i)] == seg::PORE)
            ++pore;
        else
            micro_sum += pmap.data()[static_cast<std::size_t>(i)];
    }
    const double n = static_cast<double>(labels.size());
    PorositySummary s;
    s.macro = static_cast<double>(pore) / n;
    s.micro = micro_sum / n;
    s.total = s.macro + s.micro;
    return s;
}

namespace {

// Linear interpolation between order statistics at cumulative fraction f.
double quantile_sorted(const std::vector<double>& sorted, double f) {
    double pos = f * static_cast<double>(sorted.size() - 1);
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

std::optional<double> dykstra_parsons_coefficient(std::vector<double> values) {
    if (values.size() < 2) return std::nullopt;
    std::sort(values.begin(), values.end());
    // P50 and the value exceeded by 84.1% of samples (15.9th percentile
    // ascending, one log-std below the median for log-normal fields).
    double p50 = quantile_sorted(values, 0.5);
    double p841 = quantile_sorted(values, 1.0 - 0.841);
    if (p50 == 0.0) return std::nullopt;
    return (p50 - p841) / p50;
}

std::vector<DpPoint> dykstra_parsons(const seg::LabelGrid& labels, const PorosityMap& pmap,
                                     const std::vector<Index>& block_sizes,
                                     bool include_micro) {
    if (!labels.same_shape(pmap))
        throw std::invalid_argument("dykstra_parsons: shape mismatch");
    Index min_dim = std::min({labels.nx(), labels.ny(), labels.nz()});
    std::vector<DpPoint> curve;
    for (Index b : block_sizes) {
        if (b < 1 || b > min_dim)
            throw std::invalid_argument("dykstra_parsons: block size outside volume");
        Index cx = labels.nx() / b, cy = labels.ny() / b, cz = labels.nz() / b;
        std::vector<double> block_phi;
        block_phi.reserve(static_cast<std::size_t>(cx * cy * cz));
        for (Index kz = 0; kz < cz; ++kz)
            for (Index ky = 0; ky < cy; ++ky)
                for (Index kx = 0; kx < cx; ++kx) {
                    std::uint64_t pore = 0;
                    double micro = 0.0;
                    for (Index z = kz * b; z < (kz + 1) * b; ++z)
                        for (Index y = ky * b; y < (ky + 1) * b; ++y)
                            for (Index x = kx * b; x < (kx + 1) * b; ++x) {
                                if (labels(x, y, z) == seg::PORE)
                                    ++pore;
                                else
                                    micro += pmap(x, y, z);
                            }
                    double n = static_cast<double>(b * b * b);
                    double phi = static_cast<double>(pore) / n;
                    if (include_micro) phi += micro / n;
                    block_phi.push_back(phi);
                }
        DpPoint pt;
        pt.block_size = b;
        auto v = dykstra_parsons_coefficient(std::move(block_phi));
        pt.defined = v.has_value();
        pt.v_dp = v.value_or(0.0);
        curve.push_back(pt);
    }
    return curve;
}

}  // namespace dr::poro
