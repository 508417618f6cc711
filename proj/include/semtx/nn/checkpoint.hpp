#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "semtx/nn/param_set.hpp"

namespace semtx::nn {

/// Checkpoint container, all integers little-endian:
///
///   magic    8 bytes  "SEMTXCKP"
///   version  u32      1
///   count    u32      number of records
///   record:
///     name_len u32, name (UTF-8, no terminator)
///     ndim     u32, dims u64 x ndim
///     data     f32 x prod(dims), IEEE-754 binary32
struct CheckpointRecord {
    std::string path;
    Tensor tensor;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& file, const std::vector<CheckpointRecord>& records);
std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& file);

/// Appends every parameter as "<set name>/<path>".
void append_params(std::vector<CheckpointRecord>& records, const ParamSet& set);
/// Loads values for every parameter of `set`; throws CompatibilityError on a
/// missing record or shape mismatch.
void load_params(const std::vector<CheckpointRecord>& records, ParamSet& set);

} // namespace semtx::nn
