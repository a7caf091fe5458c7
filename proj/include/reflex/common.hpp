#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace reflex {

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;

// All library errors carry a short machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define REFLEX_DEFINE_ERROR(Name)                                           \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    };

REFLEX_DEFINE_ERROR(ShapeMismatch)
REFLEX_DEFINE_ERROR(ConfigError)
REFLEX_DEFINE_ERROR(NonFiniteGradient)
REFLEX_DEFINE_ERROR(OverlapError)
REFLEX_DEFINE_ERROR(IndexError)
REFLEX_DEFINE_ERROR(Overflow)
REFLEX_DEFINE_ERROR(Underflow)
REFLEX_DEFINE_ERROR(PayloadTooWide)
REFLEX_DEFINE_ERROR(EmptyCorpus)
REFLEX_DEFINE_ERROR(UnreadablePath)
REFLEX_DEFINE_ERROR(CycleError)
REFLEX_DEFINE_ERROR(MultiParentError)
REFLEX_DEFINE_ERROR(UnknownScale)
REFLEX_DEFINE_ERROR(BadCheckpoint)
REFLEX_DEFINE_ERROR(UnknownCommand)

#undef REFLEX_DEFINE_ERROR

// splitmix64 finalizer. Used as the counter-based generator behind weight
// initialization and as a general-purpose 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small deterministic PRNG with a fixed, library-independent output stream.
// std:: distributions are implementation-defined, so sampling paths that must
// be reproducible across toolchains draw from this instead.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed = 0) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() noexcept { return unit_double(next()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t r;
        do { r = next(); } while (r >= limit);
        return r % n;
    }
    // Box-Muller; one value per call.
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

// FNV-1a, for stable content digests.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ull) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) noexcept {
    return fnv1a(s.data(), s.size(), h);
}

}  // namespace reflex
