#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace ca3 {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed from (base, purpose tag, indices). Every random draw in the
// project flows from a seed derived here, so streams never alias across purposes and
// per-seed results are independent of sweep order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::initializer_list<std::uint64_t> idx = {}) {
    std::uint64_t h = splitmix64(base ^ 0x243f6a8885a308d3ULL);
    for (unsigned char c : tag) h = splitmix64(h ^ c);
    for (std::uint64_t v : idx) h = splitmix64(h ^ v);
    return h;
}

// Deterministic draws on top of mt19937_64. The distributions are hand-rolled
// (std:: distribution output is implementation-defined) so identical seeds give
// identical results everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform on (0, 1); never exactly 0, safe under log()
    double uniform() { return (double(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double half_normal(double mean, double stddev) { return std::fabs(mean + stddev * normal()); }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace ca3
