#include "semtx/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "semtx/errors.hpp"

namespace semtx::nn {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'T', 'X', 'C', 'K', 'P'};

template <typename T>
void put_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& file) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw FormatError("truncated checkpoint " + file.string());
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

} // namespace

void write_checkpoint(const std::filesystem::path& file, const std::vector<CheckpointRecord>& records) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + file.string());
    out.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(out, kCheckpointVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(records.size()));
    for (const auto& r : records) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.path.size()));
        out.write(r.path.data(), static_cast<std::streamsize>(r.path.size()));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.tensor.shape().size()));
        for (auto d : r.tensor.shape()) put_le<std::uint64_t>(out, d);
        for (double v : r.tensor.storage()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    if (!out) throw IoError("write failed for checkpoint " + file.string());
}

std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + file.string());
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError(file.string() + " is not a checkpoint");
    const auto version = get_le<std::uint32_t>(in, file);
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version) + " in " + file.string());
    const auto count = get_le<std::uint32_t>(in, file);
    std::vector<CheckpointRecord> records;
    records.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        CheckpointRecord r;
        const auto len = get_le<std::uint32_t>(in, file);
        r.path.resize(len);
        if (!in.read(r.path.data(), len)) throw FormatError("truncated checkpoint " + file.string());
        const auto ndim = get_le<std::uint32_t>(in, file);
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape) d = static_cast<std::size_t>(get_le<std::uint64_t>(in, file));
        r.tensor = Tensor(shape);
        for (auto& v : r.tensor.storage()) v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, file)));
        records.push_back(std::move(r));
    }
    return records;
}

void append_params(std::vector<CheckpointRecord>& records, const ParamSet& set) {
    for (const auto& [path, p] : set) records.push_back({set.name() + "/" + path, p.value});
}

void load_params(const std::vector<CheckpointRecord>& records, ParamSet& set) {
    std::map<std::string, const Tensor*> by_name;
    for (const auto& r : records) by_name[r.path] = &r.tensor;
    for (auto& [path, p] : set) {
        const std::string key = set.name() + "/" + path;
        auto it = by_name.find(key);
        if (it == by_name.end()) throw CompatibilityError("checkpoint has no tensor '" + key + "'");
        if (!it->second->same_shape(p.value))
            throw CompatibilityError("checkpoint tensor '" + key + "' has shape " + shape_string(it->second->shape()) +
                                     ", model expects " + shape_string(p.value.shape()));
        p.value = *it->second;
    }
}

} // namespace semtx::nn
