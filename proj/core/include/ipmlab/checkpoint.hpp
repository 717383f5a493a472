#pragma once

#include "ipmlab/field.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ipm {

// Simulation metadata carried alongside a field in solver checkpoints.
struct SimMeta {
    double t = 0.0;
    std::uint64_t step = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

// Binary checkpoint layout (little-endian, fixed width):
//   magic "IPMCHKP1" | u32 version | u32 dimension | u32 N | u32 endian tag
//   (0x01020304) | 24-byte normalization tag | u8 has_meta
//   | N^d coefficient pairs (f64 re, f64 im) in row-major FFT order
//   | optional SimMeta (f64 t, u64 step, u64 seed, u64 config_hash).
// Round-trips are bit-exact; readers reject wrong magic/endianness/tags.
void write_checkpoint(const std::string& path, const SpectralField& f,
                      const std::optional<SimMeta>& meta = std::nullopt);

struct Checkpoint {
    SpectralField field;
    std::optional<SimMeta> meta;
};

Checkpoint read_checkpoint(const std::string& path);

} // namespace ipm
