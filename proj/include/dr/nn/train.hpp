#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dr/nn/adam.hpp"
#include "dr/nn/layers.hpp"
#include "dr/volume.hpp"

namespace dr::nn {

/// Paper defaults: lr 1e-4 decayed tenfold every twenty epochs, batch 6,
/// 100 epochs. Everything is overridable for toy runs.
struct TrainSchedule {
    double initial_lr = 1e-4;
    double decay_factor = 0.1;
    int decay_period_epochs = 20;
    int batch = 6;
    int epochs = 100;
    std::uint64_t seed = 0;
    double val_fraction = 0.1;

    void validate() const;
    double lr_at_epoch(int epoch) const;
};

struct EpochLoss {
    int epoch = 0;
    double train = 0.0;
    double val = 0.0;
};

struct EdsrTrainResult {
    EdsrNet net;
    std::vector<EpochLoss> trace;
};

/// Deterministic paired training on L1 loss; identical (data, config,
/// seed) gives bit-identical traces.
EdsrTrainResult train_edsr(const PatchPairSet& patches, const EdsrConfig& config,
                           const TrainSchedule& schedule);

struct CinLossWeights {
    double lambda1 = 10.0;  // cycle X-Y
    double lambda2 = 5.0;   // identity X-Y
    double lambda3 = 0.5;   // TV X-Y
    double beta1 = 10.0;    // cycle X-Z
    double beta2 = 5.0;     // identity X-Z
    double beta3 = 0.5;     // TV X-Z

    void validate() const;
};

/// The seven scalar pieces of the composite generator objective.
template <typename S>
struct CinLossParts {
    S adversarial;
    S cycle_xy;
    S identity_xy;
    S tv_xy;
    S cycle_xz;
    S identity_xz;
    S tv_xz;
};

double cincgan_total_loss(const CinLossParts<double>& parts, const CinLossWeights& w);
Tensor cincgan_total_loss(const CinLossParts<Tensor>& parts, const CinLossWeights& w);

/// Paper defaults for the two-stage CinCGAN run: batch 8, lr 1e-4 halved
/// every twenty epochs, 100 + 50 epochs.
struct CinSchedule {
    double initial_lr = 1e-4;
    double decay_factor = 0.5;
    int decay_period_epochs = 20;
    int batch = 8;
    int stage1_epochs = 100;
    int stage2_epochs = 50;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CinTrainConfig {
    TranslatorConfig g1;          // X -> Y deblurring generator
    TranslatorConfig g2;          // Y -> X reverse mapping
    TranslatorConfig g3;          // Z -> X downscaling generator (down_scale = edsr scale)
    DiscriminatorConfig d1;       // judges Y
    DiscriminatorConfig d2;       // judges Z
    CinLossWeights weights;
};

struct StepLoss {
    double generator = 0.0;
    double discriminator = 0.0;
    double cycle = 0.0;
};

struct CinCganModel {
    TranslatorNet g1, g2, g3;
    DiscriminatorNet d1, d2;
    EdsrNet edsr;  // fine-tuned copy of the pretrained upscaler
};

struct CinTrainResult {
    CinCganModel model;
    std::vector<StepLoss> stage1_trace;
    std::vector<StepLoss> stage2_trace;
};

/// Two-stage unpaired training. Stage 1 learns G1/G2 against D1 on
/// X -> Y -> X with Y derived internally by bicubic downsampling of the
/// HR patches; stage 2 composes G1 with the supplied pretrained EDSR and
/// trains against D2 with G3 closing the X -> Z -> X cycle.
CinTrainResult train_cincgan(const std::vector<GridU8>& lr_patches,
                             const std::vector<GridU8>& hr_patches,
                             const EdsrNet& pretrained_edsr, const CinTrainConfig& config,
                             const CinSchedule& schedule);

/// Max relative error between reverse-mode and central finite-difference
/// gradients over sampled parameter entries. The loss closure must
/// rebuild the graph from the same leaves on every call.
double gradient_check(const std::function<Tensor()>& loss, const std::vector<Tensor>& params,
                      std::uint64_t seed, int samples_per_param = 4, double step = 1e-5);

void write_loss_trace_csv(const std::string& path, const std::vector<EpochLoss>& trace);

}  // namespace dr::nn
