#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ascollab {

// splitmix64 finalizer; used both as a mixer and a seed deriver.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

inline std::uint64_t hash_str(std::string_view s) {
    // FNV-1a 64
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives an independent substream seed from a base seed and tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = mix_seed(base, hash_str(tag));
    h = mix_seed(h, a);
    h = mix_seed(h, b);
    return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view data);

// Incremental SHA-256 over a stream of chunks.
class Sha256Stream {
public:
    Sha256Stream();
    void update(std::string_view data);
    std::string hex_digest() const;

private:
    std::uint32_t state_[8];
    std::uint64_t total_len_ = 0;
    unsigned char buffer_[64];
    std::size_t buffer_len_ = 0;

    void process_block(const unsigned char* block);
};

}  // namespace ascollab
