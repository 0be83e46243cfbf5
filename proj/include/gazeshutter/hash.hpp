#pragma once

#include <cstdint>
#include <cstring>
#include <span>

namespace gazeshutter {

// FNV-1a, used to fingerprint training inputs so cross-validation folds can
// prove which data a model was fit on.
inline std::uint64_t fnv1a(std::span<const std::byte> bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_doubles(std::span<const double> values,
                                   std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(std::as_bytes(values), h);
}

}  // namespace gazeshutter
