#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stobb {

// Precondition / API misuse. Distinct from data-dependent failures below.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Two stored observations are indistinguishable on all of their positive
// attribution dimensions yet carry different labels. No value of k can
// separate them; the observation space must be changed externally.
struct AmbiguousObservationSpace : std::runtime_error {
    AmbiguousObservationSpace(std::uint64_t a, std::uint64_t b)
        : std::runtime_error("observation space is ambiguous: observations " +
                             std::to_string(a) + " and " + std::to_string(b) +
                             " are identical on all positive attribution dimensions "
                             "but carry different labels"),
          first(a), second(b) {}
    std::uint64_t first;
    std::uint64_t second;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vector = std::vector<double>;
using ClassId = int;
using ObsId = std::uint64_t;

// Shortest round-trip decimal form; the one representation used everywhere a
// floating-point value hits a file, so serialized state is byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw IoError("malformed number: '" + std::string(s) + "'");
    return v;
}

// FNV-1a, 64 bit. Used for state content hashes and seed derivation.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace stobb
