#include "dr/volume_io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace dr {

namespace {

std::uint64_t file_size_of(std::ifstream& f) {
    f.seekg(0, std::ios::end);
    std::uint64_t n = static_cast<std::uint64_t>(f.tellg());
    f.seekg(0, std::ios::beg);
    return n;
}

template <typename T>
VoxelGrid<T> load_raw_typed(const std::string& path, const std::string& meta_path) {
    RawMeta meta = parse_sidecar(meta_path);
    if (meta.depth != VoxelGrid<T>::depth())
        throw std::runtime_error("load_raw: sidecar depth " + std::to_string(meta.depth) +
                                 " does not match requested scalar type");
    if (meta.byte_order != "little")
        throw std::runtime_error("load_raw: byte_order must be 'little', got '" +
                                 meta.byte_order + "'");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_raw: cannot open " + path);
    const std::uint64_t expect =
        static_cast<std::uint64_t>(volume_of(meta.dims)) * sizeof(T);
    std::uint64_t actual = file_size_of(f);
    if (actual != expect)
        throw std::runtime_error("load_raw: size mismatch for " + path + ": expected " +
                                 std::to_string(expect) + " bytes, file has " +
                                 std::to_string(actual));
    std::vector<unsigned char> bytes(actual);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(actual));
    if (!f) throw std::runtime_error("load_raw: short read on " + path);

    std::vector<T> data(static_cast<std::size_t>(volume_of(meta.dims)));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if constexpr (sizeof(T) == 1) {
            data[i] = static_cast<T>(bytes[i]);
        } else if constexpr (std::is_same_v<T, std::uint16_t>) {
            data[i] = static_cast<std::uint16_t>(bytes[2 * i] |
                                                 (static_cast<unsigned>(bytes[2 * i + 1]) << 8));
        } else {
            std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                              (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                              (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                              (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
            float v;
            std::memcpy(&v, &u, 4);
            data[i] = v;
        }
    }
    return VoxelGrid<T>(meta.dims, meta.voxel_size_um, std::move(data));
}

template <typename T>
void save_raw_typed(const VoxelGrid<T>& g, const std::string& path,
                    const std::string& meta_path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_raw: cannot open " + path + " for writing");
    std::vector<unsigned char> bytes(g.data().size() * sizeof(T));
    for (std::size_t i = 0; i < g.data().size(); ++i) {
        if constexpr (sizeof(T) == 1) {
            bytes[i] = static_cast<unsigned char>(g.data()[i]);
        } else if constexpr (std::is_same_v<T, std::uint16_t>) {
            bytes[2 * i] = static_cast<unsigned char>(g.data()[i] & 0xff);
            bytes[2 * i + 1] = static_cast<unsigned char>(g.data()[i] >> 8);
        } else {
            std::uint32_t u;
            std::memcpy(&u, &g.data()[i], 4);
            bytes[4 * i] = static_cast<unsigned char>(u & 0xff);
            bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
            bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
            bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
        }
    }
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("save_raw: write failed on " + path);
    RawMeta meta{g.dims(), VoxelGrid<T>::depth(), g.voxel_size(), "little"};
    write_sidecar(meta_path, meta);
}

}  // namespace

RawMeta parse_sidecar(const std::string& meta_path) {
    std::ifstream f(meta_path);
    if (!f) throw std::runtime_error("sidecar: cannot open " + meta_path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("sidecar: malformed line '" + line + "' in " + meta_path);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("sidecar: missing key '" + key + "' in " + meta_path);
        return it->second;
    };
    RawMeta m;
    try {
        m.dims = {std::stoll(need("nx")), std::stoll(need("ny")), std::stoll(need("nz"))};
        m.depth = std::stoi(need("depth"));
        m.voxel_size_um = std::stod(need("voxel_size_um"));
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("sidecar: non-numeric value in " + meta_path);
    }
    m.byte_order = need("byte_order");
    if (m.depth != 8 && m.depth != 16 && m.depth != 32)
        throw std::runtime_error("sidecar: unsupported depth " + std::to_string(m.depth));
    if (!(m.voxel_size_um > 0.0)) throw std::runtime_error("sidecar: voxel_size_um must be > 0");
    return m;
}

void write_sidecar(const std::string& meta_path, const RawMeta& meta) {
    std::ofstream f(meta_path, std::ios::trunc);
    if (!f) throw std::runtime_error("sidecar: cannot open " + meta_path + " for writing");
    std::ostringstream os;
    os.precision(17);
    os << "nx=" << meta.dims[0] << "\nny=" << meta.dims[1] << "\nnz=" << meta.dims[2]
       << "\ndepth=" << meta.depth << "\nvoxel_size_um=" << meta.voxel_size_um
       << "\nbyte_order=" << meta.byte_order << "\n";
    f << os.str();
    if (!f) throw std::runtime_error("sidecar: write failed on " + meta_path);
}

GridU8 load_raw_u8(const std::string& path, const std::string& meta_path) {
    return load_raw_typed<std::uint8_t>(path, meta_path);
}
GridU16 load_raw_u16(const std::string& path, const std::string& meta_path) {
    return load_raw_typed<std::uint16_t>(path, meta_path);
}
GridF32 load_raw_f32(const std::string& path, const std::string& meta_path) {
    return load_raw_typed<float>(path, meta_path);
}

void save_raw(const GridU8& g, const std::string& path, const std::string& meta_path) {
    save_raw_typed(g, path, meta_path);
}
void save_raw(const GridU16& g, const std::string& path, const std::string& meta_path) {
    save_raw_typed(g, path, meta_path);
}
void save_raw(const GridF32& g, const std::string& path, const std::string& meta_path) {
    save_raw_typed(g, path, meta_path);
}

AnyGrid load_raw_any(const std::string& path, const std::string& meta_path) {
    RawMeta meta = parse_sidecar(meta_path);
    switch (meta.depth) {
        case 8: return load_raw_u8(path, meta_path);
        case 16: return load_raw_u16(path, meta_path);
        default: return load_raw_f32(path, meta_path);
    }
}

}  // namespace dr
