#include "dr/nn/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dr/interp.hpp"

namespace dr::nn {

namespace {
std::atomic<std::uint64_t> g_seq{0};
}

Var::Var(Shape s, bool rg) : shape(std::move(s)), requires_grad(rg), seq(++g_seq) {
    Index n = numel(shape);
    val = Arr::Zero(n);
    if (requires_grad) grad = Arr::Zero(n);
}

Tensor make_tensor(Shape shape, bool requires_grad) {
    return std::make_shared<Var>(std::move(shape), requires_grad);
}

Tensor make_tensor(Shape shape, const Arr& values, bool requires_grad) {
    auto t = std::make_shared<Var>(std::move(shape), requires_grad);
    if (values.size() != t->val.size())
        throw std::invalid_argument("make_tensor: value count does not match shape");
    t->val = values;
    return t;
}

Tensor detach(const Tensor& t) {
    auto out = std::make_shared<Var>(t->shape, false);
    out->val = t->val;
    return out;
}

namespace {

// Result node wiring: tracks gradient iff any parent does.
Tensor make_result(Shape shape, std::vector<Tensor> parents, std::function<void(Var&)> bw) {
    bool rg = false;
    for (const auto& p : parents) rg = rg || p->requires_grad;
    auto t = std::make_shared<Var>(std::move(shape), rg);
    if (rg) {
        t->parents = std::move(parents);
        t->backward_fn = std::move(bw);
    }
    return t;
}

void collect(const Tensor& t, std::unordered_set<const Var*>& seen, std::vector<Tensor>& order) {
    if (!t->requires_grad || seen.count(t.get())) return;
    seen.insert(t.get());
    for (const auto& p : t->parents) collect(p, seen, order);
    order.push_back(t);
}

}  // namespace

void backward(const Tensor& root, double seed) {
    if (!root->requires_grad) return;
    if (root->size() != 1) throw std::invalid_argument("backward: root must be scalar");
    std::unordered_set<const Var*> seen;
    std::vector<Tensor> order;
    collect(root, seen, order);
    std::sort(order.begin(), order.end(),
              [](const Tensor& a, const Tensor& b) { return a->seq > b->seq; });
    root->grad[0] += seed;
    for (const auto& t : order)
        if (t->backward_fn) t->backward_fn(*t);
}

MapDims map_dims(const Shape& s) {
    MapDims d;
    if (s.size() == 4) {
        d = {s[0], s[1], s[2], s[3]};
    } else if (s.size() == 3) {
        d = {s[0], s[1], s[2], 1};
    } else {
        throw std::invalid_argument("map_dims: expected {C, nx, ny[, nz]} shape");
    }
    return d;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a->shape != b->shape) throw std::invalid_argument("add: shape mismatch");
    auto out = make_result(a->shape, {a, b}, [a, b](Var& self) {
        if (a->requires_grad) a->grad += self.grad;
        if (b->requires_grad) b->grad += self.grad;
    });
    out->val = a->val + b->val;
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (a->shape != b->shape) throw std::invalid_argument("sub: shape mismatch");
    auto out = make_result(a->shape, {a, b}, [a, b](Var& self) {
        if (a->requires_grad) a->grad += self.grad;
        if (b->requires_grad) b->grad -= self.grad;
    });
    out->val = a->val - b->val;
    return out;
}

Tensor scale(const Tensor& a, double s) {
    auto out = make_result(a->shape, {a}, [a, s](Var& self) {
        if (a->requires_grad) a->grad += s * self.grad;
    });
    out->val = s * a->val;
    return out;
}

Tensor relu(const Tensor& a) {
    auto out = make_result(a->shape, {a}, [a](Var& self) {
        if (!a->requires_grad) return;
        for (Index i = 0; i < self.size(); ++i)
            if (a->val[i] > 0.0) a->grad[i] += self.grad[i];
    });
    out->val = a->val.max(0.0);
    return out;
}

Tensor leaky_relu(const Tensor& a, double slope) {
    auto out = make_result(a->shape, {a}, [a, slope](Var& self) {
        if (!a->requires_grad) return;
        for (Index i = 0; i < self.size(); ++i)
            a->grad[i] += (a->val[i] > 0.0 ? 1.0 : slope) * self.grad[i];
    });
    out->val = (a->val > 0.0).select(a->val, slope * a->val);
    return out;
}

Tensor l1_loss(const Tensor& pred, const Tensor& gt) {
    if (pred->shape != gt->shape) throw std::invalid_argument("l1_loss: shape mismatch");
    const double n = static_cast<double>(pred->size());
    auto out = make_result({1}, {pred, gt}, [pred, gt, n](Var& self) {
        double g = self.grad[0] / n;
        for (Index i = 0; i < pred->size(); ++i) {
            double d = pred->val[i] - gt->val[i];
            double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            if (pred->requires_grad) pred->grad[i] += s * g;
            if (gt->requires_grad) gt->grad[i] -= s * g;
        }
    });
    out->val[0] = (pred->val - gt->val).abs().sum() / n;
    return out;
}

Tensor mean_sq_err(const Tensor& a, double target) {
    const double n = static_cast<double>(a->size());
    auto out = make_result({1}, {a}, [a, target, n](Var& self) {
        if (!a->requires_grad) return;
        double g = 2.0 * self.grad[0] / n;
        for (Index i = 0; i < a->size(); ++i) a->grad[i] += g * (a->val[i] - target);
    });
    out->val[0] = (a->val - target).square().sum() / n;
    return out;
}

Tensor tv_loss(const Tensor& a) {
    MapDims d = map_dims(a->shape);
    // Forward differences along every spatial axis with extent > 1.
    struct Pair {
        Index i, j;
    };
    auto pairs = std::make_shared<std::vector<Pair>>();
    Index stride[3] = {1, d.nx, d.nx * d.ny};
    Index ext[3] = {d.nx, d.ny, d.nz};
    for (Index c = 0; c < d.c; ++c) {
        Index base = c * d.spatial();
        for (int axis = 0; axis < 3; ++axis) {
            if (ext[axis] < 2) continue;
            for (Index z = 0; z < d.nz; ++z)
                for (Index y = 0; y < d.ny; ++y)
                    for (Index x = 0; x < d.nx; ++x) {
                        Index idx[3] = {x, y, z};
                        if (idx[axis] + 1 >= ext[axis]) continue;
                        Index i = base + x * stride[0] + y * stride[1] + z * stride[2];
                        pairs->push_back({i, i + stride[axis]});
                    }
        }
    }
    const double n = pairs->empty() ? 1.0 : static_cast<double>(pairs->size());
    auto out = make_result({1}, {a}, [a, pairs, n](Var& self) {
        if (!a->requires_grad) return;
        double g = self.grad[0] / n;
        for (const auto& p : *pairs) {
            double diff = a->val[p.j] - a->val[p.i];
            double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            a->grad[p.j] += s * g;
            a->grad[p.i] -= s * g;
        }
    });
    double acc = 0.0;
    for (const auto& p : *pairs) acc += std::abs(a->val[p.j] - a->val[p.i]);
    out->val[0] = acc / n;
    return out;
}

Tensor add_scalars(const std::vector<std::pair<double, Tensor>>& weighted) {
    if (weighted.empty()) throw std::invalid_argument("add_scalars: empty sum");
    std::vector<Tensor> parents;
    for (const auto& [w, t] : weighted) {
        if (t->size() != 1) throw std::invalid_argument("add_scalars: non-scalar term");
        parents.push_back(t);
    }
    auto terms = std::make_shared<std::vector<std::pair<double, Tensor>>>(weighted);
    auto out = make_result({1}, parents, [terms](Var& self) {
        for (const auto& [w, t] : *terms)
            if (t->requires_grad) t->grad[0] += w * self.grad[0];
    });
    double acc = 0.0;
    for (const auto& [w, t] : weighted) acc += w * t->val[0];
    out->val[0] = acc;
    return out;
}

Tensor conv(const Tensor& input, const Tensor& weight, const Tensor& bias, int spatial_dims) {
    MapDims in = map_dims(input->shape);
    if (weight->shape.size() != 5)
        throw std::invalid_argument("conv: weight must be {C_out, C_in, kx, ky, kz}");
    Index c_out = weight->shape[0], c_in = weight->shape[1];
    Index kx = weight->shape[2], ky = weight->shape[3], kz = weight->shape[4];
    if (c_in != in.c) throw std::invalid_argument("conv: input channel mismatch");
    if (bias->size() != c_out) throw std::invalid_argument("conv: bias size mismatch");
    if (kx % 2 == 0 || ky % 2 == 0 || kz % 2 == 0)
        throw std::invalid_argument("conv: kernels must be odd");
    if (spatial_dims == 2 && kz != 1)
        throw std::invalid_argument("conv: 2D conv needs kz = 1");

    Shape out_shape{c_out, in.nx, in.ny, in.nz};
    const Index px = kx / 2, py = ky / 2, pz = kz / 2;
    auto out = make_result(out_shape, {input, weight, bias},
                           [input, weight, bias, in, c_out, kx, ky, kz, px, py, pz](Var& self) {
        const Index sp = in.spatial();
        for (Index co = 0; co < c_out; ++co) {
            const Index ob = co * sp;
            double bias_acc = 0.0;
            for (Index z = 0; z < in.nz; ++z)
                for (Index y = 0; y < in.ny; ++y)
                    for (Index x = 0; x < in.nx; ++x) {
                        double g = self.grad[ob + x + in.nx * (y + in.ny * z)];
                        if (g == 0.0) continue;
                        bias_acc += g;
                        for (Index ci = 0; ci < in.c; ++ci) {
                            const Index ib = ci * sp;
                            const Index wb = ((co * in.c + ci) * kx) * ky * kz;
                            for (Index dz = 0; dz < kz; ++dz) {
                                Index sz = z + dz - pz;
                                if (sz < 0 || sz >= in.nz) continue;
                                for (Index dy = 0; dy < ky; ++dy) {
                                    Index sy = y + dy - py;
                                    if (sy < 0 || sy >= in.ny) continue;
                                    for (Index dx = 0; dx < kx; ++dx) {
                                        Index sx = x + dx - px;
                                        if (sx < 0 || sx >= in.nx) continue;
                                        Index ii = ib + sx + in.nx * (sy + in.ny * sz);
                                        Index wi = wb + dx + kx * (dy + ky * dz);
                                        if (weight->requires_grad)
                                            weight->grad[wi] += g * input->val[ii];
                                        if (input->requires_grad)
                                            input->grad[ii] += g * weight->val[wi];
                                    }
                                }
                            }
                        }
                    }
            if (bias->requires_grad) bias->grad[co] += bias_acc;
        }
    });

    const Index sp = in.spatial();
    for (Index co = 0; co < c_out; ++co) {
        const Index ob = co * sp;
        const double bv = bias->val[co];
        for (Index z = 0; z < in.nz; ++z)
            for (Index y = 0; y < in.ny; ++y)
                for (Index x = 0; x < in.nx; ++x) {
                    double acc = bv;
                    for (Index ci = 0; ci < in.c; ++ci) {
                        const Index ib = ci * sp;
                        const Index wb = ((co * in.c + ci) * kx) * ky * kz;
                        for (Index dz = 0; dz < kz; ++dz) {
                            Index sz = z + dz - pz;
                            if (sz < 0 || sz >= in.nz) continue;
                            for (Index dy = 0; dy < ky; ++dy) {
                                Index sy = y + dy - py;
                                if (sy < 0 || sy >= in.ny) continue;
                                for (Index dx = 0; dx < kx; ++dx) {
                                    Index sx = x + dx - px;
                                    if (sx < 0 || sx >= in.nx) continue;
                                    acc += weight->val[wb + dx + kx * (dy + ky * dz)] *
                                           input->val[ib + sx + in.nx * (sy + in.ny * sz)];
                                }
                            }
                        }
                    }
                    out->val[ob + x + in.nx * (y + in.ny * z)] = acc;
                }
    }
    return out;
}

Tensor avg_pool(const Tensor& input, int k) {
    MapDims in = map_dims(input->shape);
    Index fx = in.nx > 1 ? k : 1, fy = in.ny > 1 ? k : 1, fz = in.nz > 1 ? k : 1;
    if (in.nx % fx || in.ny % fy || in.nz % fz)
        throw std::invalid_argument("avg_pool: dims not divisible by pool size");
    MapDims od{in.c, in.nx / fx, in.ny / fy, in.nz / fz};
    const double inv = 1.0 / static_cast<double>(fx * fy * fz);
    auto out = make_result({od.c, od.nx, od.ny, od.nz}, {input},
                           [input, in, od, fx, fy, fz, inv](Var& self) {
        if (!input->requires_grad) return;
        for (Index c = 0; c < od.c; ++c)
            for (Index z = 0; z < od.nz; ++z)
                for (Index y = 0; y < od.ny; ++y)
                    for (Index x = 0; x < od.nx; ++x) {
                        double g = inv * self.grad[x + od.nx * (y + od.ny * (z + od.nz * c))];
                        for (Index dz = 0; dz < fz; ++dz)
                            for (Index dy = 0; dy < fy; ++dy)
                                for (Index dx = 0; dx < fx; ++dx)
                                    input->grad[(x * fx + dx) +
                                                in.nx * ((y * fy + dy) +
                                                         in.ny * ((z * fz + dz) + in.nz * c))] += g;
                    }
    });
    for (Index c = 0; c < od.c; ++c)
        for (Index z = 0; z < od.nz; ++z)
            for (Index y = 0; y < od.ny; ++y)
                for (Index x = 0; x < od.nx; ++x) {
                    double acc = 0.0;
                    for (Index dz = 0; dz < fz; ++dz)
                        for (Index dy = 0; dy < fy; ++dy)
                            for (Index dx = 0; dx < fx; ++dx)
                                acc += input->val[(x * fx + dx) +
                                                  in.nx * ((y * fy + dy) +
                                                           in.ny * ((z * fz + dz) + in.nz * c))];
                    out->val[x + od.nx * (y + od.ny * (z + od.nz * c))] = acc * inv;
                }
    return out;
}

Tensor resize_linear(const Tensor& input, Dims3 target) {
    MapDims in = map_dims(input->shape);
    Dims3 id{in.nx, in.ny, in.nz};
    double fx = static_cast<double>(target[0]) / static_cast<double>(id[0]);
    double fy = static_cast<double>(target[1]) / static_cast<double>(id[1]);
    double fz = static_cast<double>(target[2]) / static_cast<double>(id[2]);
    const Index in_sp = in.spatial();
    const Index out_sp = target[0] * target[1] * target[2];
    auto out = make_result({in.c, target[0], target[1], target[2]}, {input},
                           [input, in, id, target, fx, fy, fz, in_sp, out_sp](Var& self) {
        if (!input->requires_grad) return;
        for (Index c = 0; c < in.c; ++c) {
            std::vector<double> g =
                interp::resize_linear_3d_adjoint(self.grad.data() + c * out_sp, id, target,
                                                 fx, fy, fz);
            for (Index i = 0; i < in_sp; ++i)
                input->grad[c * in_sp + i] += g[static_cast<std::size_t>(i)];
        }
    });
    for (Index c = 0; c < in.c; ++c) {
        std::vector<double> v =
            interp::resize_linear_3d(input->val.data() + c * in_sp, id, target, fx, fy, fz);
        for (Index i = 0; i < out_sp; ++i) out->val[c * out_sp + i] = v[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace dr::nn
