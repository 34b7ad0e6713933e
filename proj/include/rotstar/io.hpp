#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rotstar {

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

void write_text(const std::string& path, const std::string& content);

// Records artifacts and timings of one CLI run; written last as manifest.json.
class Manifest {
public:
    Manifest(std::string command, std::string config_hash, std::uint64_t seed);
    void add_artifact(const std::string& file);
    void add_runtime(const std::string& step, double seconds);
    nlohmann::ordered_json to_json() const;
    void write(const std::string& dir) const;

private:
    std::string command_, hash_;
    std::uint64_t seed_;
    std::vector<std::string> artifacts_;
    std::vector<std::pair<std::string, double>> runtimes_;
};

nlohmann::ordered_json error_json(const std::string& type, const std::string& message, int exit_code);

}  // namespace rotstar
