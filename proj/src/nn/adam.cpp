#include "dr/nn/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dr::nn {

void adam_step(Arr& param, const Arr& grad, AdamParamState& state, long long t,
               const AdamConfig& cfg) {
    if (param.size() != grad.size())
        throw std::invalid_argument("adam_step: param/grad size mismatch");
    if (!grad.isFinite().all())
        throw std::runtime_error("adam_step: non-finite gradient at step " + std::to_string(t));
    if (state.m.size() != param.size()) {
        state.m = Arr::Zero(param.size());
        state.v = Arr::Zero(param.size());
    }
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.square();
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    param -= cfg.lr * (state.m / bc1) / ((state.v / bc2).sqrt() + cfg.eps);
}

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), state_(params_.size()), cfg_(cfg) {}

void Adam::step() {
    ++t_;
    for (std::size_t i = 0; i < params_.size(); ++i)
        adam_step(params_[i]->val, params_[i]->grad, state_[i], t_, cfg_);
}

void Adam::zero_grad() {
    for (auto& p : params_) p->zero_grad();
}

}  // namespace dr::nn
