#include "rotstar/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <Eigen/Core>

#include "rotstar/errors.hpp"

namespace rotstar {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << content;
}

Manifest::Manifest(std::string command, std::string config_hash, std::uint64_t seed)
    : command_(std::move(command)), hash_(std::move(config_hash)), seed_(seed) {}

void Manifest::add_artifact(const std::string& file) { artifacts_.push_back(file); }
void Manifest::add_runtime(const std::string& step, double seconds) { runtimes_.emplace_back(step, seconds); }

nlohmann::ordered_json Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["config_hash"] = hash_;
    j["seed"] = seed_;
    j["version"] = {{"rotstar", "1.0.0"}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                     std::to_string(EIGEN_MINOR_VERSION)}};
    auto& a = j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& f : artifacts_) a.push_back({{"file", f}, {"config_hash", hash_}});
    auto& r = j["runtimes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : runtimes_) r[k] = v;
    return j;
}

void Manifest::write(const std::string& dir) const {
    write_text((std::filesystem::path(dir) / "manifest.json").string(), to_json().dump(2) + "\n");
}

nlohmann::ordered_json error_json(const std::string& type, const std::string& message, int exit_code) {
    return {{"error", type}, {"message", message}, {"exit_code", exit_code}};
}

}  // namespace rotstar
