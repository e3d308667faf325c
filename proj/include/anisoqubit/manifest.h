#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace anisoqubit {

inline constexpr std::string_view kVersion = "0.3.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);
/// FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path &path);

struct OutputRecord {
    std::string path;
    std::string digest;
};

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string version{kVersion};
    unsigned threads = 1;
    std::vector<OutputRecord> outputs;
    double wall_seconds = 0.0;
    double shots_per_second = 0.0;
};

std::string manifest_json(const RunManifest &m);
void write_manifest(const std::filesystem::path &path, const RunManifest &m);

}  // namespace anisoqubit
