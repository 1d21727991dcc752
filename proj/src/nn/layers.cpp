#include "dr/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dr::nn {

ConvLayer make_conv(Index c_out, Index c_in, int kernel, int spatial_dims, Rng& rng,
                    bool tracked) {
    Index kz = spatial_dims == 3 ? kernel : 1;
    ConvLayer l;
    l.spatial_dims = spatial_dims;
    l.weight = make_tensor({c_out, c_in, kernel, kernel, kz}, tracked);
    l.bias = make_tensor({c_out}, tracked);
    // Uniform in +-1/sqrt(fan_in) from the seeded generator.
    double fan_in = static_cast<double>(c_in * kernel * kernel * kz);
    double bound = 1.0 / std::sqrt(fan_in);
    for (Index i = 0; i < l.weight->size(); ++i) l.weight->val[i] = rng.uniform(-bound, bound);
    for (Index i = 0; i < l.bias->size(); ++i) l.bias->val[i] = rng.uniform(-bound, bound);
    return l;
}

void EdsrConfig::validate() const {
    if (dims != 2 && dims != 3) throw std::invalid_argument("EdsrConfig: dims must be 2 or 3");
    if (filters < 1) throw std::invalid_argument("EdsrConfig: filters must be >= 1");
    if (residual_blocks < 0) throw std::invalid_argument("EdsrConfig: negative block count");
    if (scale < 1) throw std::invalid_argument("EdsrConfig: scale must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
        throw std::invalid_argument("EdsrConfig: kernel must be odd and positive");
}

Tensor EdsrNet::forward(const Tensor& x) const {
    MapDims in = map_dims(x->shape);
    if (in.c != 1) throw std::invalid_argument("EdsrNet: expects a single input channel");
    if (cfg.dims == 2 && in.nz != 1)
        throw std::invalid_argument("EdsrNet: 2D net fed a 3D map");
    Dims3 target{in.nx * cfg.scale, in.ny * cfg.scale,
                 cfg.dims == 3 ? in.nz * cfg.scale : in.nz};
    Tensor h = head(x);
    Tensor r = h;
    for (const auto& [c1, c2] : blocks) r = add(r, c2(relu(c1(r))));
    Tensor up = resize_linear(r, target);
    Tensor y = tail(up);
    return add(y, resize_linear(x, target));
}

std::vector<Tensor> EdsrNet::params() const {
    std::vector<Tensor> p{head.weight, head.bias};
    for (const auto& [c1, c2] : blocks) {
        p.push_back(c1.weight);
        p.push_back(c1.bias);
        p.push_back(c2.weight);
        p.push_back(c2.bias);
    }
    p.push_back(tail.weight);
    p.push_back(tail.bias);
    return p;
}

void EdsrNet::set_tracked(bool tracked) {
    for (auto& t : params()) {
        t->requires_grad = tracked;
        t->grad = tracked ? Arr::Zero(t->size()) : Arr();
    }
}

EdsrNet make_edsr(const EdsrConfig& cfg, Rng& rng) {
    cfg.validate();
    EdsrNet net;
    net.cfg = cfg;
    net.head = make_conv(cfg.filters, 1, cfg.kernel, cfg.dims, rng);
    for (int i = 0; i < cfg.residual_blocks; ++i)
        net.blocks.emplace_back(make_conv(cfg.filters, cfg.filters, cfg.kernel, cfg.dims, rng),
                                make_conv(cfg.filters, cfg.filters, cfg.kernel, cfg.dims, rng));
    net.tail = make_conv(1, cfg.filters, cfg.kernel, cfg.dims, rng);
    return net;
}

Tensor TranslatorNet::forward(const Tensor& x) const {
    MapDims in = map_dims(x->shape);
    if (in.c != 1) throw std::invalid_argument("TranslatorNet: expects a single input channel");
    Tensor inp = x;
    if (cfg.down_scale > 1) {
        Dims3 target{in.nx / cfg.down_scale, in.ny / cfg.down_scale,
                     cfg.dims == 3 ? in.nz / cfg.down_scale : in.nz};
        if (target[0] < 1 || target[1] < 1 || (cfg.dims == 3 && target[2] < 1))
            throw std::invalid_argument("TranslatorNet: input too small for down_scale");
        inp = resize_linear(x, target);
    }
    Tensor h = head(inp);
    Tensor r = h;
    for (const auto& [c1, c2] : blocks) r = add(r, c2(relu(c1(r))));
    return add(tail(r), inp);
}

std::vector<Tensor> TranslatorNet::params() const {
    std::vector<Tensor> p{head.weight, head.bias};
    for (const auto& [c1, c2] : blocks) {
        p.push_back(c1.weight);
        p.push_back(c1.bias);
        p.push_back(c2.weight);
        p.push_back(c2.bias);
    }
    p.push_back(tail.weight);
    p.push_back(tail.bias);
    return p;
}

void TranslatorNet::set_tracked(bool tracked) {
    for (auto& t : params()) {
        t->requires_grad = tracked;
        t->grad = tracked ? Arr::Zero(t->size()) : Arr();
    }
}

TranslatorNet make_translator(const TranslatorConfig& cfg, Rng& rng) {
    if (cfg.dims != 2 && cfg.dims != 3)
        throw std::invalid_argument("TranslatorConfig: dims must be 2 or 3");
    TranslatorNet net;
    net.cfg = cfg;
    net.head = make_conv(cfg.filters, 1, cfg.kernel, cfg.dims, rng);
    for (int i = 0; i < cfg.residual_blocks; ++i)
        net.blocks.emplace_back(make_conv(cfg.filters, cfg.filters, cfg.kernel, cfg.dims, rng),
                                make_conv(cfg.filters, cfg.filters, cfg.kernel, cfg.dims, rng));
    net.tail = make_conv(1, cfg.filters, cfg.kernel, cfg.dims, rng);
    return net;
}

Tensor DiscriminatorNet::forward(const Tensor& x) const {
    Tensor h = x;
    for (const auto& c : convs) h = avg_pool(leaky_relu(c(h)), 2);
    return final(h);
}

std::vector<Tensor> DiscriminatorNet::params() const {
    std::vector<Tensor> p;
    for (const auto& c : convs) {
        p.push_back(c.weight);
        p.push_back(c.bias);
    }
    p.push_back(final.weight);
    p.push_back(final.bias);
    return p;
}

void DiscriminatorNet::set_tracked(bool tracked) {
    for (auto& t : params()) {
        t->requires_grad = tracked;
        t->grad = tracked ? Arr::Zero(t->size()) : Arr();
    }
}

DiscriminatorNet make_discriminator(const DiscriminatorConfig& cfg, Rng& rng) {
    DiscriminatorNet net;
    net.cfg = cfg;
    Index c_in = 1;
    for (int i = 0; i < cfg.levels; ++i) {
        net.convs.push_back(make_conv(cfg.filters, c_in, cfg.kernel, cfg.dims, rng));
        c_in = cfg.filters;
    }
    net.final = make_conv(1, c_in, cfg.kernel, cfg.dims, rng);
    return net;
}

namespace {

template <typename Net, typename Maker>
Net clone_net(const Net& net, Maker maker) {
    Rng rng(0);
    Net out = maker(net.cfg, rng);
    auto src = net.params();
    auto dst = out.params();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i]->val = src[i]->val;
    return out;
}

}  // namespace

EdsrNet clone(const EdsrNet& net) {
    return clone_net(net, [](const EdsrConfig& c, Rng& r) { return make_edsr(c, r); });
}
TranslatorNet clone(const TranslatorNet& net) {
    return clone_net(net, [](const TranslatorConfig& c, Rng& r) { return make_translator(c, r); });
}
DiscriminatorNet clone(const DiscriminatorNet& net) {
    return clone_net(net,
                     [](const DiscriminatorConfig& c, Rng& r) { return make_discriminator(c, r); });
}

Tensor tensor_from_grid(const GridU8& g) {
    auto t = make_tensor({1, g.nx(), g.ny(), g.nz()});
    for (Index i = 0; i < g.size(); ++i)
        t->val[i] = static_cast<double>(g.data()[static_cast<std::size_t>(i)]);
    return t;
}

GridU8 grid_from_tensor(const Tensor& t, double voxel_size) {
    MapDims d = map_dims(t->shape);
    if (d.c != 1) throw std::invalid_argument("grid_from_tensor: expects one channel");
    GridU8 g({d.nx, d.ny, d.nz}, voxel_size);
    for (Index i = 0; i < t->size(); ++i) {
        double x = std::floor(std::clamp(t->val[i], 0.0, 255.0) + 0.5);
        g.data()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::min(x, 255.0));
    }
    return g;
}

}  // namespace dr::nn
