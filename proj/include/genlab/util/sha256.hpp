#ifndef GENLAB_UTIL_SHA256_HPP
#define GENLAB_UTIL_SHA256_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace genlab {

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    std::array<std::uint8_t, 32> digest();  // finalizes; call once

    static std::string hex(const void* data, std::size_t len);
    static std::string hex(const std::vector<std::uint8_t>& bytes) {
        return hex(bytes.data(), bytes.size());
    }

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string to_hex(const std::array<std::uint8_t, 32>& d);

}  // namespace genlab

#endif
