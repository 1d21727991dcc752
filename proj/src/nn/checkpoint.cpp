#include "dr/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dr::nn {

namespace {

constexpr char kMagic[8] = {'D', 'R', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
enum Kind : std::uint32_t { kEdsr = 1, kTranslator = 2, kDiscriminator = 3 };

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("checkpoint: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("checkpoint: truncated parameter block");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

void write_params(std::ostream& os, const std::vector<Tensor>& params) {
    std::uint64_t total = 0;
    for (const auto& p : params) total += static_cast<std::uint64_t>(p->size());
    put_u32(os, static_cast<std::uint32_t>(total));
    for (const auto& p : params)
        for (Index i = 0; i < p->size(); ++i) put_f64(os, p->val[i]);
}

void read_params(std::istream& is, std::vector<Tensor> params) {
    std::uint64_t total = 0;
    for (const auto& p : params) total += static_cast<std::uint64_t>(p->size());
    std::uint32_t stored = get_u32(is);
    if (stored != total)
        throw std::runtime_error("checkpoint: parameter count mismatch (file " +
                                 std::to_string(stored) + ", net " + std::to_string(total) + ")");
    for (auto& p : params)
        for (Index i = 0; i < p->size(); ++i) p->val[i] = get_f64(is);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    return f;
}

std::ifstream open_in(const std::string& path, Kind expected) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    std::uint32_t version = get_u32(f);
    if (version != kVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    std::uint32_t kind = get_u32(f);
    if (kind != static_cast<std::uint32_t>(expected))
        throw std::runtime_error("checkpoint: wrong network kind in " + path);
    return f;
}

}  // namespace

void save_checkpoint(const EdsrNet& net, const std::string& path) {
    auto f = open_out(path);
    f.write(kMagic, 8);
    put_u32(f, kVersion);
    put_u32(f, kEdsr);
    put_u32(f, static_cast<std::uint32_t>(net.cfg.dims));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.filters));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.residual_blocks));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.scale));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.kernel));
    write_params(f, net.params());
    if (!f) throw std::runtime_error("checkpoint: write failed on " + path);
}

EdsrNet load_edsr_checkpoint(const std::string& path) {
    auto f = open_in(path, kEdsr);
    EdsrConfig cfg;
    cfg.dims = static_cast<int>(get_u32(f));
    cfg.filters = static_cast<int>(get_u32(f));
    cfg.residual_blocks = static_cast<int>(get_u32(f));
    cfg.scale = static_cast<int>(get_u32(f));
    cfg.kernel = static_cast<int>(get_u32(f));
    Rng rng(0);
    EdsrNet net = make_edsr(cfg, rng);
    read_params(f, net.params());
    return net;
}

void save_checkpoint(const TranslatorNet& net, const std::string& path) {
    auto f = open_out(path);
    f.write(kMagic, 8);
    put_u32(f, kVersion);
    put_u32(f, kTranslator);
    put_u32(f, static_cast<std::uint32_t>(net.cfg.dims));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.filters));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.residual_blocks));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.kernel));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.down_scale));
    write_params(f, net.params());
    if (!f) throw std::runtime_error("checkpoint: write failed on " + path);
}

TranslatorNet load_translator_checkpoint(const std::string& path) {
    auto f = open_in(path, kTranslator);
    TranslatorConfig cfg;
    cfg.dims = static_cast<int>(get_u32(f));
    cfg.filters = static_cast<int>(get_u32(f));
    cfg.residual_blocks = static_cast<int>(get_u32(f));
    cfg.kernel = static_cast<int>(get_u32(f));
    cfg.down_scale = static_cast<int>(get_u32(f));
    Rng rng(0);
    TranslatorNet net = make_translator(cfg, rng);
    read_params(f, net.params());
    return net;
}

void save_checkpoint(const DiscriminatorNet& net, const std::string& path) {
    auto f = open_out(path);
    f.write(kMagic, 8);
    put_u32(f, kVersion);
    put_u32(f, kDiscriminator);
    put_u32(f, static_cast<std::uint32_t>(net.cfg.dims));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.filters));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.levels));
    put_u32(f, static_cast<std::uint32_t>(net.cfg.kernel));
    write_params(f, net.params());
    if (!f) throw std::runtime_error("checkpoint: write failed on " + path);
}

DiscriminatorNet load_discriminator_checkpoint(const std::string& path) {
    auto f = open_in(path, kDiscriminator);
    DiscriminatorConfig cfg;
    cfg.dims = static_cast<int>(get_u32(f));
    cfg.filters = static_cast<int>(get_u32(f));
    cfg.levels = static_cast<int>(get_u32(f));
    cfg.kernel = static_cast<int>(get_u32(f));
    Rng rng(0);
    DiscriminatorNet net = make_discriminator(cfg, rng);
    read_params(f, net.params());
    return net;
}

}  // namespace dr::nn
