#include "rmstable/rng.hpp"

#include <cmath>

namespace rms {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double uniform_open(Engine& eng) {
    // 53 random bits, offset by half an ulp so 0 and 1 are excluded
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Engine& eng) {
    // Box-Muller, one variate per call so the draw count per variate is fixed
    double u = uniform_open(eng), v = uniform_open(eng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

double standard_exponential(Engine& eng) { return -std::log(uniform_open(eng)); }

}  // namespace rms
