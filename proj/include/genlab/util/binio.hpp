#ifndef GENLAB_UTIL_BINIO_HPP
#define GENLAB_UTIL_BINIO_HPP

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace genlab {

// Little-endian byte buffer helpers. Host is assumed little-endian for the
// fast path; the per-byte fallback keeps the formats portable.

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(out, v);
}

inline std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

inline double get_f64(const std::uint8_t* p) {
    const std::uint64_t v = get_u64(p);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path.string());
    f.seekg(0, std::ios::end);
    const std::streamoff n = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
    if (n > 0) f.read(reinterpret_cast<char*>(bytes.data()), n);
    if (!f) throw std::runtime_error("short read: " + path.string());
    return bytes;
}

// Atomic file write: temp file in the same directory, then rename. The
// temp name is unique per process and per call so concurrent writers of
// the same target cannot collide.
inline void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t len) {
    namespace fs = std::filesystem;
    static std::atomic<std::uint64_t> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(static_cast<unsigned long>(::getpid())) + "." +
           std::to_string(counter.fetch_add(1));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for write: " + tmp.string());
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    write_file_atomic(path, bytes.data(), bytes.size());
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace genlab

#endif
