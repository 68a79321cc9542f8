#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace lexmatcher {

/// FNV-1a 64 over the raw bytes; change detection for manifests, not crypto.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_file(const std::filesystem::path& path);
std::string digest_text(std::string_view text);

/// Per-stage record of input/config/output digests, enabling pipeline resume.
struct StageManifest {
    std::string stage;
    std::map<std::string, std::string> inputs;  // path -> digest
    std::string config_digest;
    std::map<std::string, std::string> outputs; // path -> digest

    void save(const std::filesystem::path& path) const;
    static StageManifest load(const std::filesystem::path& path);
};

/// True when a manifest at `path` matches the expected inputs and config and
/// every recorded output still exists with its recorded digest.
bool stage_is_current(const std::filesystem::path& path, const std::string& stage,
                      const std::map<std::string, std::string>& inputs,
                      const std::string& config_digest);

} // namespace lexmatcher
