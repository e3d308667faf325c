#include "anisoqubit/manifest.h"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <stdexcept>

namespace anisoqubit {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_digest(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex64(fnv1a64(bytes));
}

std::string manifest_json(const RunManifest &m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config_digest"] = m.config_digest;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["threads"] = m.threads;
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto &o : m.outputs) j["outputs"].push_back({{"path", o.path}, {"fnv1a64", o.digest}});
    j["wall_seconds"] = m.wall_seconds;
    j["shots_per_second"] = m.shots_per_second;
    return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path &path, const RunManifest &m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << manifest_json(m);
}

}  // namespace anisoqubit
