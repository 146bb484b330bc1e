#ifndef MVFLOW_MANIFEST_HPP
#define MVFLOW_MANIFEST_HPP

#include <map>
#include <string>

namespace mvflow {

// FNV-1a 64-bit, hex-encoded; stable across platforms for identical bytes.
std::string fnv1a_hex(const std::string& bytes);
std::string checksum_file(const std::string& path);

// write-temp-then-rename so concurrent readers never see partial files
void write_file_atomic(const std::string& path, const std::string& content);

struct RunManifest {
    std::string config_hash;
    std::string version = "0.1.0";
    double wall_time_s = 0.0;
    std::map<std::string, std::string> files;  // name -> checksum
    bool failed = false;
    std::string failure;

    std::string to_json() const;
    static RunManifest from_json_file(const std::string& path);
    void write(const std::string& dir) const;
};

} // namespace mvflow

#endif
