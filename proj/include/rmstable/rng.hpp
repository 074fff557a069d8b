#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rms {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);

// Counter-based substreams. A Stream is a 64-bit key; children are derived by
// hashing (key, tag) or (key, index), and engine(i) seeds a fresh generator for
// draw i. Draw i therefore never depends on how many other draws exist or on
// which worker produced them.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : key_(splitmix64(seed)) {}

    Stream child(std::string_view tag) const { return Stream(key_, fnv1a(tag)); }
    Stream child(std::uint64_t index) const { return Stream(key_, index ^ 0x5bd1e9955bd1e995ULL); }
    Engine engine(std::uint64_t index) const { return Engine(mix(key_, index)); }
    std::uint64_t key() const { return key_; }

private:
    Stream(std::uint64_t key, std::uint64_t salt) : key_(mix(key, salt)) {}
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return splitmix64(a ^ splitmix64(b + 0x9e3779b97f4a7c15ULL));
    }
    std::uint64_t key_;
};

// Uniform on the open interval (0,1).
double uniform_open(Engine& eng);
double standard_normal(Engine& eng);
double standard_exponential(Engine& eng);

}  // namespace rms
