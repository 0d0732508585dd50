#pragma once

// Exact interval iteration of the real Collatz map, digit-prefix reals, and the
// parity-pattern measure oracle.

#include <rcollatz/balanced_word.hpp>
#include <rcollatz/ternary_dyadic.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rcollatz {

struct ExactInterval {
    Rational lo;
    Rational hi;
    bool lo_open = false;
    bool hi_open = false;

    /// Validates lo < hi, or lo == hi with both ends closed.
    static ExactInterval make(Rational lo, Rational hi, bool lo_open, bool hi_open);
    static ExactInterval point(const Rational& x) { return make(x, x, false, false); }

    Rational width() const { return hi - lo; }
    bool is_point() const { return lo == hi; }
    bool contains(const Rational& x) const;
    ExactInterval scaled(const Rational& factor) const;
    std::string to_string() const;

    friend bool operator==(const ExactInterval&, const ExactInterval&) = default;
};

/// Smallest and largest value of [x] over the interval.
std::pair<BigInt, BigInt> nearest_range(const ExactInterval& interval);

struct Straddle {
    Rational half_integer; // the half-integer inside the interval where [x] changes
};

class StraddleError : public std::runtime_error {
public:
    explicit StraddleError(Rational at);
    const Rational& at() const noexcept { return at_; }

private:
    Rational at_;
};

std::variant<ExactInterval, Straddle> try_col_step_interval(const ExactInterval& interval);
/// Image of a parity-constant interval; throws StraddleError otherwise.
ExactInterval col_step_interval(const ExactInterval& interval);

/// A real known through the balanced-ternary digits at positions hi_exp down to
/// hi_exp - length + 1; everything below is unknown.
struct DigitStreamReal {
    std::vector<Digit> prefix;
    std::int64_t hi_exp = 0;
    ExactInterval interval;

    static DigitStreamReal from_digits(std::vector<Digit> digits, std::int64_t hi_exp);
    static DigitStreamReal prefix_of(const Rational& x, std::int64_t hi_exp, std::size_t length);

    std::size_t length() const noexcept { return prefix.size(); }
    std::int64_t lo_exp() const noexcept { return hi_exp - static_cast<std::int64_t>(prefix.size()) + 1; }
    std::string prefix_string() const { return render_window(prefix, hi_exp, lo_exp()); }
};

/// i.i.d. uniform digits from CounterRng(seed), starting at position b_exp - 1.
/// A word whose leading non-zero digit is ⊖ is negated, so the sampled value is
/// uniform on (0, 3^b_exp / 2].
DigitStreamReal sample_digit_stream(std::uint64_t seed, std::int64_t b_exp, std::size_t length);

/// Prefix length that keeps the interval width below 3^-margin after M steps.
std::size_t required_prefix_length(std::int64_t b_exp, std::int64_t max_steps, std::int64_t margin = 20);

struct StreamReport {
    enum class Outcome { Reached, NotReached, PrecisionExhausted };

    Outcome outcome = Outcome::NotReached;
    std::int64_t step = 0; // reached_at or the step that straddled; M when not reached
    std::int64_t steps_computed = 0;
    ParityVector parities;
    ExactInterval final_interval;

    std::optional<std::int64_t> reached_at() const {
        return outcome == Outcome::Reached ? std::optional<std::int64_t>(step) : std::nullopt;
    }
};

std::string to_string(StreamReport::Outcome outcome);

StreamReport iterate_stream(const ExactInterval& start, std::int64_t max_steps, const Rational& threshold);
inline StreamReport iterate_stream(const DigitStreamReal& x, std::int64_t max_steps, const Rational& threshold) {
    return iterate_stream(x.interval, max_steps, threshold);
}

/// JSON document for a stream run: seed, prefix length, outcome, step counts.
std::string stream_report_json(const StreamReport& report, std::uint64_t seed, std::size_t prefix_length);

inline constexpr int kDefaultPatternCap = 16;

/// Exact Lebesgue measure of each parity-pattern cell inside [base, base + 2^N).
/// Cell index packs p_0 into bit 0, p_1 into bit 1, and so on.
struct PatternCellTable {
    int depth = 0;
    Rational base;
    std::vector<Rational> measures;

    const Rational& measure(const ParityVector& pattern) const;
    static std::string pattern_string(std::size_t index, int depth);
    Rational total() const;
    /// Fraction of [base, base + 2^N) whose pattern weight is >= w (or <= w).
    Rational fraction_weight_at_least(const Rational& w) const;
    Rational fraction_weight_at_most(const Rational& w) const;
    /// CSV with header "pattern,measure", measure as "p/q".
    std::string to_csv() const;
};

PatternCellTable pattern_cells(const Rational& base, int depth, int cap = kDefaultPatternCap);

} // namespace rcollatz
