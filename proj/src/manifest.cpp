#include "mvflow/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvflow/errors.hpp"

namespace mvflow {

std::string fnv1a_hex(const std::string& bytes) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

std::string checksum_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeFailure("checksum_file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw RuntimeFailure("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw RuntimeFailure("cannot rename " + tmp + " to " + path);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["wall_time_s"] = wall_time_s;
    j["failed"] = failed;
    j["failure"] = failure;
    nlohmann::ordered_json files_j = nlohmann::ordered_json::object();
    for (const auto& [name, sum] : files) files_j[name] = sum;
    j["files"] = files_j;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open manifest: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    RunManifest m;
    m.config_hash = j.value("config_hash", "");
    m.version = j.value("version", "");
    m.wall_time_s = j.value("wall_time_s", 0.0);
    m.failed = j.value("failed", false);
    m.failure = j.value("failure", "");
    if (j.contains("files"))
        for (auto it = j["files"].begin(); it != j["files"].end(); ++it)
            m.files[it.key()] = it.value().get<std::string>();
    return m;
}

void RunManifest::write(const std::string& dir) const {
    write_file_atomic(dir + "/manifest.json", to_json());
}

} // namespace mvflow
