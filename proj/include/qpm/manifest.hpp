#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpm/config.hpp"
#include "qpm/io.hpp"
#include "qpm/numeric.hpp"

namespace qpm {

/// Record of one run: config hash, toolkit version, and every emitted
/// artifact with its checksum. Written as manifest.json in the output dir.
class RunManifest {
public:
    RunManifest(const RunConfig& cfg, std::filesystem::path out_dir)
        : out_dir_(std::move(out_dir)) {
        config_hash_ = fnv1a64_hex(config_to_json(cfg).dump());
        created_ = timestamp();
    }

    void add(const std::filesystem::path& artifact) {
        std::string content = read_text_file(artifact);
        Entry e;
        e.path = std::filesystem::relative(artifact, out_dir_).string();
        e.checksum = fnv1a64_hex(content);
        e.bytes = content.size();
        for (auto& existing : entries_)
            if (existing.path == e.path) {
                existing = e;
                return;
            }
        entries_.push_back(std::move(e));
    }

    void write() const {
        nlohmann::json j;
        j["config_hash"] = config_hash_;
        j["toolkit_version"] = toolkit_version;
        j["created"] = created_;
        j["artifacts"] = nlohmann::json::array();
        for (const auto& e : entries_)
            j["artifacts"].push_back({{"path", e.path}, {"checksum", e.checksum},
                                      {"bytes", e.bytes}});
        write_text_file(out_dir_ / "manifest.json", j.dump(2) + "\n");
    }

    /// True when every listed artifact exists and matches its checksum.
    static bool verify(const std::filesystem::path& out_dir) {
        auto j = nlohmann::json::parse(read_text_file(out_dir / "manifest.json"));
        for (const auto& e : j.at("artifacts")) {
            std::filesystem::path p = out_dir / e.at("path").get<std::string>();
            if (!std::filesystem::exists(p)) return false;
            if (fnv1a64_hex(read_text_file(p)) != e.at("checksum").get<std::string>())
                return false;
        }
        return true;
    }

private:
    struct Entry {
        std::string path, checksum;
        std::size_t bytes = 0;
    };

    static std::string timestamp() {
        auto now = std::chrono::system_clock::now();
        std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::filesystem::path out_dir_;
    std::string config_hash_, created_;
    std::vector<Entry> entries_;
};

} // namespace qpm
