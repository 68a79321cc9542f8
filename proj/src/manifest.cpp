#include "lexmatcher/manifest.hpp"

#include "lexmatcher/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>

namespace lexmatcher {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 1099511628211ull;
    }
    return hash;
}

namespace {

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace

std::string digest_text(std::string_view text) { return hex64(fnv1a64(text)); }

std::string digest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for digest");
    std::uint64_t hash = 1469598103934665603ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    return hex64(hash);
}

void StageManifest::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["inputs"] = inputs;
    j["config_digest"] = config_digest;
    j["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

StageManifest StageManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, true);
    StageManifest manifest;
    manifest.stage = j.at("stage").get<std::string>();
    manifest.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    manifest.config_digest = j.at("config_digest").get<std::string>();
    manifest.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return manifest;
}

bool stage_is_current(const std::filesystem::path& path, const std::string& stage,
                      const std::map<std::string, std::string>& inputs,
                      const std::string& config_digest) {
    if (!std::filesystem::exists(path)) return false;
    StageManifest manifest;
    try {
        manifest = StageManifest::load(path);
    } catch (const std::exception&) {
        return false; // unreadable manifest = stale
    }
    if (manifest.stage != stage || manifest.config_digest != config_digest ||
        manifest.inputs != inputs) {
        return false;
    }
    for (const auto& [output, digest] : manifest.outputs) {
        std::error_code ec;
        if (!std::filesystem::exists(output, ec)) return false;
        try {
            if (digest_file(output) != digest) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

} // namespace lexmatcher
