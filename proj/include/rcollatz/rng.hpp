#pragma once

// Counter-based generator: output i is splitmix64's finalizer applied to
// key + (i + 1) * golden gamma. Random access, no hidden state beyond the counter,
// and identical across platforms.

#include <rcollatz/ternary_dyadic.hpp>

#include <cstdint>
#include <string_view>

namespace rcollatz {

inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter/v1";

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Independent stream key for the given (seed, index) pair.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t at(std::uint64_t counter) const noexcept;
    std::uint64_t next() noexcept { return at(counter_++); }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Uniform in [0, bound), bound > 0, by rejection.
    std::uint64_t uniform_below(std::uint64_t bound);
    /// Uniform in [0, bound), bound > 0, by rejection on whole 64-bit limbs.
    BigInt uniform_below(const BigInt& bound);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace rcollatz
