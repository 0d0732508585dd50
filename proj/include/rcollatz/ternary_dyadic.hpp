#pragma once

// Exact arithmetic on the orbit closure {n * 3^j / 2^k} of the real Collatz map.

#include <rcollatz/errors.hpp>

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rcollatz {

using BigInt = mpz_class;
using Rational = mpq_class;

inline constexpr std::size_t kDefaultBitCeiling = std::size_t{1} << 20;

/// Positive real n * 3^j / 2^k. Canonical form keeps n coprime to 6, so equality
/// is componentwise.
class TernaryDyadic {
public:
    TernaryDyadic() : n_(1) {}
    explicit TernaryDyadic(BigInt n, std::int64_t three_exp = 0, std::int64_t two_exp = 0);

    static TernaryDyadic from_rational(const Rational& q);
    /// Parses "n*3^j/2^k"; the "*3^j" and "/2^k" parts are optional.
    static TernaryDyadic parse(std::string_view text);

    const BigInt& significand() const noexcept { return n_; }
    std::int64_t three_exp() const noexcept { return j_; }
    std::int64_t two_exp() const noexcept { return k_; }

    Rational to_rational() const;
    std::string to_string() const;
    double log2() const;

    /// this * 3^d3 / 2^d2
    TernaryDyadic scaled(std::int64_t d3, std::int64_t d2) const {
        TernaryDyadic out = *this;
        out.j_ += d3;
        out.k_ += d2;
        return out;
    }

    friend bool operator==(const TernaryDyadic&, const TernaryDyadic&) = default;
    friend std::strong_ordering operator<=>(const TernaryDyadic& a, const TernaryDyadic& b);

private:
    BigInt n_;
    std::int64_t j_ = 0;
    std::int64_t k_ = 0;
};

int compare(const TernaryDyadic& x, const Rational& q);
inline bool operator<=(const TernaryDyadic& x, const Rational& q) { return compare(x, q) <= 0; }
inline bool operator>(const TernaryDyadic& x, const Rational& q) { return compare(x, q) > 0; }

/// Nearest integer [q] with q - [q] in (-1/2, 1/2], i.e. ceil(q - 1/2).
BigInt nearest_int(const Rational& q);
BigInt nearest_int(const TernaryDyadic& x);

/// Truncated scientific notation with `digits` significant digits. Convenience
/// output only; never used in decisions.
std::string approx_decimal(const Rational& q, int digits = 60);
std::string approx_decimal(const TernaryDyadic& x, int digits = 60);

TernaryDyadic col_step(const TernaryDyadic& x);

struct ParityVector {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    std::size_t weight() const noexcept;
    std::string to_string() const;
    friend bool operator==(const ParityVector&, const ParityVector&) = default;
};

/// Incremental orbit iterator. Keeps the value as P / (Q3 * 2^e) so each step
/// costs one small multiply or shift instead of re-powering 3^j.
class OrbitCursor {
public:
    explicit OrbitCursor(const TernaryDyadic& x, std::size_t bit_ceiling = kDefaultBitCeiling);

    TernaryDyadic value() const { return TernaryDyadic(n_, j_, k_); }
    std::int64_t steps() const noexcept { return steps_; }
    std::int64_t odd_steps() const noexcept { return odd_steps_; }
    BigInt nearest() const;
    bool nearest_is_odd() const;
    int compare(const Rational& q) const;
    double log2() const;

    /// Applies one step; returns the parity bit used.
    bool step();

private:
    BigInt n_;
    std::int64_t j_ = 0;
    std::int64_t k_ = 0;
    BigInt numer_;
    BigInt three_den_;
    std::int64_t two_den_ = 0;
    std::size_t ceiling_;
    std::int64_t steps_ = 0;
    std::int64_t odd_steps_ = 0;
    mutable BigInt scratch_;
};

std::vector<TernaryDyadic> orbit(const TernaryDyadic& x, std::int64_t steps,
                                 std::size_t bit_ceiling = kDefaultBitCeiling);
ParityVector parity_vector(const TernaryDyadic& x, std::int64_t steps,
                           std::size_t bit_ceiling = kDefaultBitCeiling);

/// Unique t with 3^t * x in (3/4, 9/4].
std::int64_t t_exponent(const TernaryDyadic& x);
TernaryDyadic project_pi(const TernaryDyadic& x);
bool in_invariant_interval(const TernaryDyadic& x);
/// The restriction T of the map to (3/4, 9/4]; throws DomainError elsewhere.
TernaryDyadic t_map(const TernaryDyadic& x);

/// x ⪯₃ y: y = 3^m * x for some m >= 0.
bool cmp3(const TernaryDyadic& x, const TernaryDyadic& y);

struct StoppingReport {
    std::optional<std::int64_t> tau; // empty when exhausted
    TernaryDyadic min_value;
    std::int64_t steps_computed = 0;
    Rational threshold;

    bool exhausted() const noexcept { return !tau.has_value(); }
};

StoppingReport stopping_time(const TernaryDyadic& x, const Rational& threshold, std::int64_t max_steps,
                             std::size_t bit_ceiling = kDefaultBitCeiling);

/// CSV dump: step,n,j,k,approx_decimal_60_digits
std::string orbit_csv(const std::vector<TernaryDyadic>& values);

} // namespace rcollatz
