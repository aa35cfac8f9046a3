#pragma once
// Whole-file byte helpers. All on-disk formats here are small enough
// (well under the memory budget) to be staged in memory, which also
// keeps checksum computation trivial.

#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace kgbench {

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

} // namespace kgbench
