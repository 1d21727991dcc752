#include "dr/prep.hpp"

namespace dr::prep {

std::pair<GridU8, NormalizationParams> normalize_u16_to_u8(const GridU16& g,
                                                           double clip_fraction) {
    if (!(clip_fraction >= 0.0 && clip_fraction < 0.5))
        throw std::invalid_argument("normalize: clip_fraction must be in [0, 0.5)");
    if (g.empty()) throw std::invalid_argument("normalize: empty grid");
    Histogram h = histogram(g);
    const std::uint64_t n = h.total;
    // Order-statistic quantiles from the histogram; clip 0 keeps min/max.
    std::uint64_t k_lo = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(clip_fraction * static_cast<double>(n))));
    std::uint64_t k_hi = n - k_lo + 1;
    Index p_min = -1, p_max = -1;
    std::uint64_t cum = 0;
    for (std::size_t v = 0; v < h.bins.size(); ++v) {
        cum += h.bins[v];
        if (p_min < 0 && cum >= k_lo) p_min = static_cast<Index>(v);
        if (p_max < 0 && cum >= k_hi) {
            p_max = static_cast<Index>(v);
            break;
        }
    }
    if (p_min >= p_max)
        throw std::runtime_error("normalize: degenerate intensity range (p_min == p_max)");

    NormalizationParams params{static_cast<double>(p_min), static_cast<double>(p_max),
                               clip_fraction};
    GridU8 out(g.dims(), g.voxel_size());
    const double inv = 1.0 / (params.p_max - params.p_min);
    for (Index i = 0; i < g.size(); ++i) {
        double p = static_cast<double>(g.data()[static_cast<std::size_t>(i)]);
        double t = std::clamp((p - params.p_min) * inv, 0.0, 1.0);
        out.data()[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(std::floor(t * 255.0 + 0.5));
    }
    return {std::move(out), params};
}

}  // namespace dr::prep
