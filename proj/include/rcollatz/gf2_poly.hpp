#pragma once

// Polynomials over GF(2) and the polynomial Collatz analogues S, S0, S1.

#include <rcollatz/balanced_word.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rcollatz {

/// Bit-packed coefficients, bit i of word i/64 is the coefficient of x^i.
class GF2Poly {
public:
    GF2Poly() = default;
    explicit GF2Poly(std::vector<std::uint64_t> words);
    static GF2Poly from_bits(std::uint64_t bits) { return GF2Poly(std::vector<std::uint64_t>{bits}); }
    static GF2Poly monomial(std::size_t degree);
    static GF2Poly from_hex(std::string_view hex);

    bool is_zero() const noexcept { return words_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const noexcept;
    bool coeff(std::size_t i) const noexcept;
    bool at_zero() const noexcept { return coeff(0); }
    bool at_one() const noexcept;
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    GF2Poly shifted_left(std::size_t n) const;
    GF2Poly shifted_right(std::size_t n) const;

    std::string to_hex() const;
    std::string to_string() const;

    friend GF2Poly operator+(const GF2Poly& a, const GF2Poly& b);
    friend GF2Poly operator*(const GF2Poly& a, const GF2Poly& b);
    friend bool operator==(const GF2Poly&, const GF2Poly&) = default;

private:
    void trim();
    std::vector<std::uint64_t> words_;
};

/// Quotient and remainder; throws DomainError on division by zero.
std::pair<GF2Poly, GF2Poly> divmod(const GF2Poly& a, const GF2Poly& b);
/// a / b, throwing std::logic_error if b does not divide a.
GF2Poly exact_divide(const GF2Poly& a, const GF2Poly& b);

GF2Poly s_map(const GF2Poly& f);
GF2Poly s0_map(const GF2Poly& f);
GF2Poly s1_map(const GF2Poly& f);
/// f(x) -> f(x + 1)
GF2Poly shift_argument(const GF2Poly& f);

struct SweepResult {
    bool pass = true;
    std::optional<GF2Poly> counterexample;
    std::size_t checked = 0;
};

/// shift_argument(S(f)) == S0(shift_argument(f)) for every f of degree <= max_degree.
SweepResult conjugacy_check(int max_degree);
/// x * S0(f) == S1(f) when f(0) = 1, S0(f) == S1(f) otherwise.
SweepResult acceleration_check(int max_degree);

/// Word a_n...a_0 over {⊕, 0} <-> sum a_k x^k.
GF2Poly word_to_poly(const BalancedWord& w);
BalancedWord poly_to_word(const GF2Poly& f);
/// The two-letter word map: append ⊕ to odd words, then ⊕0^j⊕ -> 0⊕^(j+1).
BalancedWord binary_word_map(const BalancedWord& w);

} // namespace rcollatz
