#pragma once

#include <cstdint>
#include <string>

namespace twistop {

inline constexpr const char* version_string = "0.1.0";

// FNV-1a 64-bit; used to stamp outputs with a digest of the resolved config
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace twistop
