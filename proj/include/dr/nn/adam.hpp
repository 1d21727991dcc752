#pragma once

#include <vector>

#include "dr/nn/tensor.hpp"

namespace dr::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamParamState {
    Arr m;
    Arr v;
};

/// Standard bias-corrected Adam update for one parameter array.
/// Aborts on non-finite gradients with a diagnostic message.
void adam_step(Arr& param, const Arr& grad, AdamParamState& state, long long t,
               const AdamConfig& cfg);

/// Optimizer over a fixed parameter list; reads grads from the tensors.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig cfg = {});

    void step();
    void zero_grad();
    void set_lr(double lr) { cfg_.lr = lr; }
    double lr() const { return cfg_.lr; }
    long long steps() const { return t_; }

private:
    std::vector<Tensor> params_;
    std::vector<AdamParamState> state_;
    AdamConfig cfg_;
    long long t_ = 0;
};

}  // namespace dr::nn
