// Counter-based hashing used to address Bernoulli trials by (seed, site, index),
// plus seed parsing and derivation of independent sub-seeds.

#ifndef ERW_RNG_HPP
#define ERW_RNG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erw {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream tags keep cookie trials, fair-tail words and joint coupled draws on
/// disjoint counters.
enum class StreamTag : std::uint64_t { Cookie = 1, FairWord = 2, JointDraw = 3 };

/// Pseudo-random 64-bit value for (seed, site, tag, index); a pure function.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::int64_t site, StreamTag tag, std::uint64_t index) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(site) * 0xD1B54A32D192ED03ULL));
    h = mix64(h + (static_cast<std::uint64_t>(tag) << 56) + index * 0x8CB92BA72F3D8DD7ULL);
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Independent sub-seed for stream `stream` of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + stream * 0x9E3779B97F4A7C15ULL);
}

/// Decimal or 0x-prefixed hexadecimal 64-bit seed.
inline std::uint64_t parse_seed(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty seed");
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    }
    std::uint64_t value = 0;
    for (char c : text) {
        int digit = -1;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
        if (digit < 0) throw std::invalid_argument("invalid seed \"" + std::string(text) + "\"");
        const unsigned __int128 next = static_cast<unsigned __int128>(value) * base + digit;
        if (next > UINT64_MAX) throw std::invalid_argument("seed does not fit in 64 bits");
        value = static_cast<std::uint64_t>(next);
    }
    return value;
}

}  // namespace erw

#endif  // ERW_RNG_HPP
