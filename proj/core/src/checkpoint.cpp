#include "ipmlab/checkpoint.hpp"

#include "ipmlab/errors.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ipm {

namespace {

constexpr char kMagic[8] = {'I', 'P', 'M', 'C', 'H', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;
// Identifies the coefficient scaling so files from a differently normalized
// build are rejected instead of silently misread.
constexpr char kNormTag[24] = "l2-parseval-2pi-half-d\0";

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IntegrityError("checkpoint: truncated file");
    return v;
}

} // namespace

void write_checkpoint(const std::string& path, const SpectralField& f,
                      const std::optional<SimMeta>& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("checkpoint: cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, std::uint32_t(f.grid().dimension()));
    put(os, std::uint32_t(f.grid().n()));
    put(os, kEndianTag);
    os.write(kNormTag, sizeof(kNormTag));
    put(os, std::uint8_t(meta.has_value() ? 1 : 0));
    for (std::size_t i = 0; i < f.size(); ++i) {
        put(os, f[i].real());
        put(os, f[i].imag());
    }
    if (meta) {
        put(os, meta->t);
        put(os, meta->step);
        put(os, meta->seed);
        put(os, meta->config_hash);
    }
    os.flush();
    if (!os) throw IntegrityError("checkpoint: write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open for reading: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IntegrityError("checkpoint: bad magic in " + path);
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw IntegrityError("checkpoint: unsupported version");
    const auto dim = get<std::uint32_t>(is);
    const auto n = get<std::uint32_t>(is);
    const auto endian = get<std::uint32_t>(is);
    if (endian != kEndianTag) throw IntegrityError("checkpoint: endianness mismatch");
    char norm[24];
    is.read(norm, sizeof(norm));
    if (!is || std::memcmp(norm, kNormTag, sizeof(kNormTag)) != 0)
        throw IntegrityError("checkpoint: normalization tag mismatch");
    const auto has_meta = get<std::uint8_t>(is);
    if (has_meta > 1) throw IntegrityError("checkpoint: corrupt meta flag");

    Checkpoint ck{SpectralField(Grid(int(dim), int(n))), std::nullopt};
    for (std::size_t i = 0; i < ck.field.size(); ++i) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        ck.field[i] = cdouble(re, im);
    }
    if (has_meta) {
        SimMeta m;
        m.t = get<double>(is);
        m.step = get<std::uint64_t>(is);
        m.seed = get<std::uint64_t>(is);
        m.config_hash = get<std::uint64_t>(is);
        ck.meta = m;
    }
    is.peek();
    if (!is.eof()) throw IntegrityError("checkpoint: trailing bytes in " + path);
    return ck;
}

} // namespace ipm
