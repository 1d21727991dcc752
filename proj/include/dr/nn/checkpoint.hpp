#pragma once

#include <string>

#include "dr/nn/layers.hpp"

namespace dr::nn {

/// Versioned binary checkpoint: 8-byte magic, format version, network
/// kind, config block, then all parameters as little-endian float64 in
/// declaration order.
void save_checkpoint(const EdsrNet& net, const std::string& path);
void save_checkpoint(const TranslatorNet& net, const std::string& path);
void save_checkpoint(const DiscriminatorNet& net, const std::string& path);

EdsrNet load_edsr_checkpoint(const std::string& path);
TranslatorNet load_translator_checkpoint(const std::string& path);
DiscriminatorNet load_discriminator_checkpoint(const std::string& path);

}  // namespace dr::nn
