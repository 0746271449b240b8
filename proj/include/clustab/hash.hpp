#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace clustab {

// FNV-1a 64-bit, used to fingerprint experiment inputs in report provenance.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h);

// Hash of a file's raw bytes, formatted "fnv1a64:<16 hex digits>".
std::string hash_file(const std::string& path);

std::string hash_string(std::string_view bytes);

}  // namespace clustab
