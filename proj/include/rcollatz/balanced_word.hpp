#pragma once

// Balanced ternary words and the word-level Collatz rewriting.
//
// Text form: '+' is ⊕ (+1), '-' is ⊖ (-1), '0' is 0, '.' is the radix point.

#include <rcollatz/ternary_dyadic.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rcollatz {

enum class Digit : std::int8_t { Minus = -1, Zero = 0, Plus = 1 };

constexpr int value_of(Digit d) noexcept { return static_cast<int>(d); }
constexpr Digit negate(Digit d) noexcept { return static_cast<Digit>(-static_cast<int>(d)); }
constexpr char to_char(Digit d) noexcept {
    return d == Digit::Plus ? '+' : (d == Digit::Minus ? '-' : '0');
}
Digit digit_from_char(char c);

enum class Parity { Even, Odd };

/// Digits most-significant first; `point_offset` digits sit right of the radix point.
class BalancedWord {
public:
    BalancedWord() : digits_{Digit::Zero} {}
    explicit BalancedWord(std::vector<Digit> digits, std::int64_t point_offset = 0);

    static BalancedWord parse(std::string_view text);

    const std::vector<Digit>& digits() const noexcept { return digits_; }
    std::int64_t point_offset() const noexcept { return point_offset_; }
    std::size_t size() const noexcept { return digits_.size(); }
    bool is_integral() const noexcept { return point_offset_ == 0; }

    /// Strips leading zeros left of the radix point, keeping at least one digit there.
    BalancedWord canonical() const;
    bool is_canonical() const { return canonical() == *this; }

    std::string to_string() const;
    Rational value() const;

    /// Appends a digit at the least significant end (same point offset).
    BalancedWord appended(Digit d) const;

    friend bool operator==(const BalancedWord&, const BalancedWord&) = default;

private:
    std::vector<Digit> digits_;
    std::int64_t point_offset_ = 0;
};

/// Either a run of zeros or a pair block a 0^n b with a, b non-zero.
struct Block {
    enum class Kind { ZeroRun, Pair };

    Kind kind = Kind::ZeroRun;
    Digit lead = Digit::Zero;
    Digit trail = Digit::Zero;
    std::size_t zeros = 0;

    static Block zero_run(std::size_t n) { return {Kind::ZeroRun, Digit::Zero, Digit::Zero, n}; }
    static Block pair(Digit a, std::size_t n, Digit b) { return {Kind::Pair, a, b, n}; }

    std::vector<Digit> spell() const;
    std::string to_string() const;
    friend bool operator==(const Block&, const Block&) = default;
};

BalancedWord int_to_bt(const BigInt& n);
BigInt bt_to_int(const BalancedWord& w);
Parity word_parity(const BalancedWord& w);

/// Greedy left-to-right decomposition of an even word.
std::vector<Block> parse_blocks(const BalancedWord& w);
BalancedWord halve_even_word(const BalancedWord& w);

/// Col_N on the word level: halve if even, otherwise append ⊕ first.
BalancedWord collatz_word_step(const BalancedWord& w);

/// Accelerated integer Collatz: n/2 or (3n+1)/2.
BigInt collatz_int_step(const BigInt& n);

/// Balanced ternary digits of q at positions hi down to lo, with the ⊕-tail
/// convention: the digit at z is the balanced residue of [q / 3^z] mod 3.
std::vector<Digit> digits_of_rational(const Rational& q, std::int64_t hi, std::int64_t lo);
std::vector<Digit> digits_of_ternary_dyadic(const TernaryDyadic& x, std::int64_t hi, std::int64_t lo);

/// Renders a window of digits (positions hi..lo) with '.' after position 0 when
/// the window crosses it.
std::string render_window(const std::vector<Digit>& digits, std::int64_t hi, std::int64_t lo);

/// [q / 3^z] as an integer: the value of the expansion at positions >= z.
BigInt head_at(const Rational& q, std::int64_t z);

} // namespace rcollatz
