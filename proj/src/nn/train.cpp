#include "dr/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace dr::nn {

void TrainSchedule::validate() const {
    if (!(initial_lr > 0.0)) throw std::invalid_argument("TrainSchedule: lr must be > 0");
    if (batch < 1) throw std::invalid_argument("TrainSchedule: batch must be >= 1");
    if (epochs < 0) throw std::invalid_argument("TrainSchedule: negative epoch count");
    if (decay_period_epochs < 1)
        throw std::invalid_argument("TrainSchedule: decay period must be >= 1");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("TrainSchedule: val_fraction must be in [0, 1)");
}

double TrainSchedule::lr_at_epoch(int epoch) const {
    return initial_lr * std::pow(decay_factor, epoch / decay_period_epochs);
}

void CinLossWeights::validate() const {
    for (double w : {lambda1, lambda2, lambda3, beta1, beta2, beta3})
        if (w < 0.0) throw std::invalid_argument("CinLossWeights: negative weight");
}

void CinSchedule::validate() const {
    if (!(initial_lr > 0.0)) throw std::invalid_argument("CinSchedule: lr must be > 0");
    if (batch < 1) throw std::invalid_argument("CinSchedule: batch must be >= 1");
    if (stage1_epochs < 0 || stage2_epochs < 0)
        throw std::invalid_argument("CinSchedule: negative epoch count");
    if (decay_period_epochs < 1)
        throw std::invalid_argument("CinSchedule: decay period must be >= 1");
}

double cincgan_total_loss(const CinLossParts<double>& p, const CinLossWeights& w) {
    w.validate();
    return p.adversarial + w.lambda1 * p.cycle_xy + w.lambda2 * p.identity_xy +
           w.lambda3 * p.tv_xy + w.beta1 * p.cycle_xz + w.beta2 * p.identity_xz +
           w.beta3 * p.tv_xz;
}

Tensor cincgan_total_loss(const CinLossParts<Tensor>& p, const CinLossWeights& w) {
    w.validate();
    return add_scalars({{1.0, p.adversarial},
                        {w.lambda1, p.cycle_xy},
                        {w.lambda2, p.identity_xy},
                        {w.lambda3, p.tv_xy},
                        {w.beta1, p.cycle_xz},
                        {w.beta2, p.identity_xz},
                        {w.beta3, p.tv_xz}});
}

namespace {

double eval_l1(const EdsrNet& net, const std::vector<const GridU8*>& lr,
               const std::vector<const GridU8*>& hr) {
    double total = 0.0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
        Tensor pred = net.forward(tensor_from_grid(*lr[i]));
        Tensor gt = tensor_from_grid(*hr[i]);
        total += l1_loss(pred, gt)->scalar();
    }
    return lr.empty() ? 0.0 : total / static_cast<double>(lr.size());
}

}  // namespace

EdsrTrainResult train_edsr(const PatchPairSet& patches, const EdsrConfig& config,
                           const TrainSchedule& schedule) {
    schedule.validate();
    config.validate();
    if (!patches.paired) throw std::invalid_argument("train_edsr: unpaired patch set");
    if (patches.lr_patches.empty()) throw std::invalid_argument("train_edsr: empty patch set");
    if (patches.lr_patches.size() != patches.hr_patches.size())
        throw std::invalid_argument("train_edsr: LR/HR patch counts differ");
    if (patches.scale != config.scale)
        throw std::invalid_argument("train_edsr: patch scale does not match config");

    Rng rng(schedule.seed);
    EdsrTrainResult res{make_edsr(config, rng), {}};

    // Deterministic validation split: seeded shuffle, tail fraction.
    std::vector<std::size_t> idx(patches.lr_patches.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
    std::size_t n_val = static_cast<std::size_t>(
        std::floor(schedule.val_fraction * static_cast<double>(idx.size())));
    if (n_val == idx.size()) n_val = idx.size() - 1;
    std::vector<const GridU8*> train_lr, train_hr, val_lr, val_hr;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        bool is_val = k >= idx.size() - n_val;
        (is_val ? val_lr : train_lr).push_back(&patches.lr_patches[idx[k]]);
        (is_val ? val_hr : train_hr).push_back(&patches.hr_patches[idx[k]]);
    }

    Adam opt(res.net.params(), {schedule.initial_lr});
    for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
        opt.set_lr(schedule.lr_at_epoch(epoch));
        // Fresh seeded order each epoch.
        std::vector<std::size_t> order(train_lr.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);

        double train_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t bsz = std::min<std::size_t>(schedule.batch, order.size() - pos);
            opt.zero_grad();
            for (std::size_t b = 0; b < bsz; ++b, ++pos) {
                const GridU8* lr = train_lr[order[pos]];
                const GridU8* hr = train_hr[order[pos]];
                Tensor loss = l1_loss(res.net.forward(tensor_from_grid(*lr)),
                                      tensor_from_grid(*hr));
                backward(loss, 1.0 / static_cast<double>(bsz));
                train_loss += loss->scalar();
            }
            opt.step();
        }
        train_loss /= train_lr.empty() ? 1.0 : static_cast<double>(train_lr.size());
        double val_loss = val_lr.empty() ? train_loss : eval_l1(res.net, val_lr, val_hr);
        res.trace.push_back({epoch, train_loss, val_loss});
    }
    return res;
}

namespace {

struct GanStepContext {
    Adam* gen_opt;
    Adam* disc_opt;
};

Tensor downsample_tensor(const GridU8& hr, int scale) {
    GridU8 down = resample_aniso(hr, 1.0 / scale, 1.0 / scale, hr.nz() > 1 ? 1.0 / scale : 1.0,
                                 ResampleMethod::BicubicSlices);
    return tensor_from_grid(down);
}

}  // namespace

CinTrainResult train_cincgan(const std::vector<GridU8>& lr_patches,
                             const std::vector<GridU8>& hr_patches,
                             const EdsrNet& pretrained_edsr, const CinTrainConfig& config,
                             const CinSchedule& schedule) {
    schedule.validate();
    config.weights.validate();
    if (lr_patches.empty() || hr_patches.empty())
        throw std::invalid_argument("train_cincgan: empty patch set");
    const int scale = pretrained_edsr.cfg.scale;
    if (config.g3.down_scale != scale)
        throw std::invalid_argument("train_cincgan: g3 down_scale must equal EDSR scale");

    Rng rng(schedule.seed);
    CinTrainResult res;
    res.model.g1 = make_translator(config.g1, rng);
    res.model.g2 = make_translator(config.g2, rng);
    res.model.g3 = make_translator(config.g3, rng);
    res.model.d1 = make_discriminator(config.d1, rng);
    res.model.d2 = make_discriminator(config.d2, rng);
    res.model.edsr = clone(pretrained_edsr);

    // The clean bicubic LR domain Y is derived from the HR patches.
    std::vector<Tensor> ys;
    ys.reserve(hr_patches.size());
    for (const auto& hr : hr_patches) ys.push_back(downsample_tensor(hr, scale));
    std::vector<Tensor> xs;
    xs.reserve(lr_patches.size());
    for (const auto& lr : lr_patches) xs.push_back(tensor_from_grid(lr));
    std::vector<Tensor> zs;
    zs.reserve(hr_patches.size());
    for (const auto& hr : hr_patches) zs.push_back(tensor_from_grid(hr));

    const CinLossWeights& w = config.weights;
    auto zero_scalar = [] { return make_tensor({1}); };

    // Stage 1: X -> Y -> X with G1, G2 against D1.
    {
        std::vector<Tensor> gen_params = res.model.g1.params();
        for (auto& p : res.model.g2.params()) gen_params.push_back(p);
        Adam gen_opt(gen_params, {schedule.initial_lr});
        Adam disc_opt(res.model.d1.params(), {schedule.initial_lr});

        for (int epoch = 0; epoch < schedule.stage1_epochs; ++epoch) {
            double lr_now = schedule.initial_lr *
                            std::pow(schedule.decay_factor, epoch / schedule.decay_period_epochs);
            gen_opt.set_lr(lr_now);
            disc_opt.set_lr(lr_now);
            std::size_t steps = (xs.size() + schedule.batch - 1) / schedule.batch;
            for (std::size_t s = 0; s < steps; ++s) {
                std::size_t bsz = std::min<std::size_t>(schedule.batch, xs.size());
                StepLoss sl;
                // Generator pass.
                res.model.d1.set_tracked(false);
                gen_opt.zero_grad();
                for (std::size_t b = 0; b < bsz; ++b) {
                    const Tensor& x = xs[rng.below(xs.size())];
                    const Tensor& y = ys[rng.below(ys.size())];
                    Tensor fake_y = res.model.g1.forward(x);
                    Tensor back_x = res.model.g2.forward(fake_y);
                    CinLossParts<Tensor> parts{
                        mean_sq_err(res.model.d1.forward(fake_y), 1.0),
                        l1_loss(back_x, x),
                        l1_loss(res.model.g1.forward(y), y),
                        tv_loss(fake_y),
                        zero_scalar(),
                        zero_scalar(),
                        zero_scalar()};
                    Tensor loss = cincgan_total_loss(parts, w);
                    backward(loss, 1.0 / static_cast<double>(bsz));
                    sl.generator += loss->scalar() / static_cast<double>(bsz);
                    sl.cycle += parts.cycle_xy->scalar() / static_cast<double>(bsz);
                }
                gen_opt.step();
                res.model.d1.set_tracked(true);
                // Discriminator pass on fresh draws; generator outputs detached.
                disc_opt.zero_grad();
                for (std::size_t b = 0; b < bsz; ++b) {
                    const Tensor& x = xs[rng.below(xs.size())];
                    const Tensor& y = ys[rng.below(ys.size())];
                    res.model.g1.set_tracked(false);
                    Tensor fake_y = detach(res.model.g1.forward(x));
                    res.model.g1.set_tracked(true);
                    Tensor d_loss = add_scalars({{0.5, mean_sq_err(res.model.d1.forward(y), 1.0)},
                                                 {0.5, mean_sq_err(res.model.d1.forward(fake_y), 0.0)}});
                    backward(d_loss, 1.0 / static_cast<double>(bsz));
                    sl.discriminator += d_loss->scalar() / static_cast<double>(bsz);
                }
                disc_opt.step();
                res.stage1_trace.push_back(sl);
            }
        }
    }

    // Stage 2: X -> Z -> X with the composite G1 + EDSR generator, G3, D2.
    {
        std::vector<Tensor> gen_params = res.model.g1.params();
        for (auto& p : res.model.edsr.params()) gen_params.push_back(p);
        for (auto& p : res.model.g3.params()) gen_params.push_back(p);
        Adam gen_opt(gen_params, {schedule.initial_lr});
        Adam disc_opt(res.model.d2.params(), {schedule.initial_lr});

        for (int epoch = 0; epoch < schedule.stage2_epochs; ++epoch) {
            double lr_now = schedule.initial_lr *
                            std::pow(schedule.decay_factor, epoch / schedule.decay_period_epochs);
            gen_opt.set_lr(lr_now);
            disc_opt.set_lr(lr_now);
            std::size_t steps = (xs.size() + schedule.batch - 1) / schedule.batch;
            for (std::size_t s = 0; s < steps; ++s) {
                std::size_t bsz = std::min<std::size_t>(schedule.batch, xs.size());
                StepLoss sl;
                res.model.d2.set_tracked(false);
                gen_opt.zero_grad();
                for (std::size_t b = 0; b < bsz; ++b) {
                    std::size_t zi = rng.below(zs.size());
                    const Tensor& x = xs[rng.below(xs.size())];
                    const Tensor& z = zs[zi];
                    Tensor fake_z = res.model.edsr.forward(res.model.g1.forward(x));
                    Tensor back_x = res.model.g3.forward(fake_z);
                    // Identity anchor: G3 on a real Z should land on its bicubic LR.
                    CinLossParts<Tensor> parts{
                        mean_sq_err(res.model.d2.forward(fake_z), 1.0),
                        zero_scalar(),
                        zero_scalar(),
                        zero_scalar(),
                        l1_loss(back_x, x),
                        l1_loss(res.model.g3.forward(z), downsample_tensor(
                                    hr_patches[zi], scale)),
                        tv_loss(fake_z)};
                    Tensor loss = cincgan_total_loss(parts, w);
                    backward(loss, 1.0 / static_cast<double>(bsz));
                    sl.generator += loss->scalar() / static_cast<double>(bsz);
                    sl.cycle += parts.cycle_xz->scalar() / static_cast<double>(bsz);
                }
                gen_opt.step();
                res.model.d2.set_tracked(true);
                disc_opt.zero_grad();
                for (std::size_t b = 0; b < bsz; ++b) {
                    const Tensor& x = xs[rng.below(xs.size())];
                    const Tensor& z = zs[rng.below(zs.size())];
                    res.model.g1.set_tracked(false);
                    res.model.edsr.set_tracked(false);
                    Tensor fake_z = detach(res.model.edsr.forward(res.model.g1.forward(x)));
                    res.model.g1.set_tracked(true);
                    res.model.edsr.set_tracked(true);
                    Tensor d_loss = add_scalars({{0.5, mean_sq_err(res.model.d2.forward(z), 1.0)},
                                                 {0.5, mean_sq_err(res.model.d2.forward(fake_z), 0.0)}});
                    backward(d_loss, 1.0 / static_cast<double>(bsz));
                    sl.discriminator += d_loss->scalar() / static_cast<double>(bsz);
                }
                disc_opt.step();
                res.stage2_trace.push_back(sl);
            }
        }
    }
    return res;
}

double gradient_check(const std::function<Tensor()>& loss, const std::vector<Tensor>& params,
                      std::uint64_t seed, int samples_per_param, double step) {
    // Analytic gradients from one reverse sweep.
    for (const auto& p : params) p->zero_grad();
    backward(loss());
    std::vector<Arr> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params)
        analytic.push_back(p->requires_grad ? p->grad : Arr::Zero(p->size()));

    Rng rng(seed);
    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const Tensor& p = params[pi];
        if (!p->requires_grad) continue;
        Index n = p->size();
        for (int s = 0; s < samples_per_param; ++s) {
            Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
            double orig = p->val[i];
            p->val[i] = orig + step;
            double up = loss()->scalar();
            p->val[i] = orig - step;
            double down = loss()->scalar();
            p->val[i] = orig;
            double fd = (up - down) / (2.0 * step);
            double a = analytic[pi][i];
            double denom = std::max({std::abs(a), std::abs(fd), 1e-8});
            max_rel = std::max(max_rel, std::abs(a - fd) / denom);
        }
    }
    return max_rel;
}

void write_loss_trace_csv(const std::string& path, const std::vector<EpochLoss>& trace) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_loss_trace_csv: cannot open " + path);
    f << "epoch,train_loss,val_loss\n";
    f.precision(12);
    for (const auto& e : trace) f << e.epoch << "," << e.train << "," << e.val << "\n";
}

}  // namespace dr::nn
