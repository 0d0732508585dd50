#include <rcollatz/rng.hpp>

#include <stdexcept>

namespace rcollatz {

static_assert(sizeof(unsigned long) == 8, "limb draws assume 64-bit unsigned long");

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + kGamma));
}

std::uint64_t CounterRng::at(std::uint64_t counter) const noexcept { return mix64(key_ + (counter + 1) * kGamma); }

std::uint64_t CounterRng::uniform_below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("uniform_below: empty range");
    }
    // reject the top partial copy of [0, bound)
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        const std::uint64_t v = next();
        if (v < limit) {
            return v % bound;
        }
    }
}

BigInt CounterRng::uniform_below(const BigInt& bound) {
    if (sgn(bound) <= 0) {
        throw std::invalid_argument("uniform_below: empty range");
    }
    const auto bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    BigInt v;
    for (;;) {
        v = 0;
        std::size_t have = 0;
        while (have < bits) {
            mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), 64);
            mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(next()));
            have += 64;
        }
        mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
        if (v < bound) {
            return v;
        }
    }
}

} // namespace rcollatz
