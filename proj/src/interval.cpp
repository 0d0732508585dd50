#include <rcollatz/interval.hpp>
#include <rcollatz/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rcollatz {

namespace {

const Rational kHalf(1, 2);
const Rational kThreeHalves(3, 2);

bool is_integer(const Rational& q) { return q.get_den() == 1; }

BigInt pow3(std::int64_t e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(e));
    return p;
}

Rational pow3_signed(std::int64_t e) {
    return e >= 0 ? Rational(pow3(e)) : Rational(BigInt(1), pow3(-e));
}

} // namespace

ExactInterval ExactInterval::make(Rational lo, Rational hi, bool lo_open, bool hi_open) {
    if (lo > hi || (lo == hi && (lo_open || hi_open))) {
        throw DomainError("empty interval");
    }
    return ExactInterval{std::move(lo), std::move(hi), lo_open, hi_open};
}

bool ExactInterval::contains(const Rational& x) const {
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
}

ExactInterval ExactInterval::scaled(const Rational& factor) const {
    return ExactInterval{lo * factor, hi * factor, lo_open, hi_open};
}

std::string ExactInterval::to_string() const {
    return std::string(lo_open ? "(" : "[") + lo.get_str() + ", " + hi.get_str() + (hi_open ? ")" : "]");
}

std::pair<BigInt, BigInt> nearest_range(const ExactInterval& interval) {
    BigInt lo = nearest_int(interval.lo);
    if (interval.lo_open && is_integer(interval.lo - kHalf)) {
        lo += 1;
    }
    return {lo, nearest_int(interval.hi)};
}

StraddleError::StraddleError(Rational at)
    : std::runtime_error("nearest integer changes at " + at.get_str() + " inside the interval"), at_(std::move(at)) {}

std::variant<ExactInterval, Straddle> try_col_step_interval(const ExactInterval& interval) {
    auto [lo, hi] = nearest_range(interval);
    if (lo != hi) {
        return Straddle{Rational(lo) + kHalf};
    }
    return interval.scaled(mpz_odd_p(lo.get_mpz_t()) ? kThreeHalves : kHalf);
}

ExactInterval col_step_interval(const ExactInterval& interval) {
    auto r = try_col_step_interval(interval);
    if (auto* s = std::get_if<Straddle>(&r)) {
        throw StraddleError(s->half_integer);
    }
    return std::get<ExactInterval>(std::move(r));
}

DigitStreamReal DigitStreamReal::from_digits(std::vector<Digit> digits, std::int64_t hi_exp) {
    if (digits.empty()) {
        throw DomainError("digit stream needs at least one digit");
    }
    DigitStreamReal out;
    out.prefix = std::move(digits);
    out.hi_exp = hi_exp;
    const Rational unit = pow3_signed(out.lo_exp());
    BigInt head = 0;
    for (Digit d : out.prefix) {
        head *= 3;
        head += value_of(d);
    }
    const Rational centre = Rational(head) * unit;
    const Rational half_width = unit / 2;
    out.interval = ExactInterval::make(centre - half_width, centre + half_width, true, false);
    return out;
}

DigitStreamReal DigitStreamReal::prefix_of(const Rational& x, std::int64_t hi_exp, std::size_t length) {
    if (length == 0) {
        throw DomainError("digit stream needs at least one digit");
    }
    if (sgn(head_at(x, hi_exp + 1)) != 0) {
        throw DomainError("value has non-zero digits above position " + std::to_string(hi_exp));
    }
    const std::int64_t lo = hi_exp - static_cast<std::int64_t>(length) + 1;
    return from_digits(digits_of_rational(x, hi_exp, lo), hi_exp);
}

DigitStreamReal sample_digit_stream(std::uint64_t seed, std::int64_t b_exp, std::size_t length) {
    if (length == 0) {
        throw DomainError("digit stream needs at least one digit");
    }
    CounterRng rng(seed);
    std::vector<Digit> digits(length);
    for (auto& d : digits) {
        d = static_cast<Digit>(static_cast<int>(rng.uniform_below(3)) - 1);
    }
    const auto lead = std::find_if(digits.begin(), digits.end(), [](Digit d) { return d != Digit::Zero; });
    if (lead != digits.end() && *lead == Digit::Minus) {
        for (auto& d : digits) {
            d = negate(d);
        }
    }
    return DigitStreamReal::from_digits(std::move(digits), b_exp - 1);
}

std::size_t required_prefix_length(std::int64_t b_exp, std::int64_t max_steps, std::int64_t margin) {
    const double growth = static_cast<double>(max_steps) * std::log(1.5) / std::log(3.0) + static_cast<double>(b_exp);
    const auto need = static_cast<std::int64_t>(std::ceil(growth)) + margin;
    return static_cast<std::size_t>(std::max<std::int64_t>(need, 1));
}

std::string to_string(StreamReport::Outcome outcome) {
    switch (outcome) {
    case StreamReport::Outcome::Reached:
        return "reached";
    case StreamReport::Outcome::NotReached:
        return "not_reached";
    case StreamReport::Outcome::PrecisionExhausted:
        return "precision_exhausted";
    }
    return "unknown";
}

StreamReport iterate_stream(const ExactInterval& start, std::int64_t max_steps, const Rational& threshold) {
    StreamReport report;
    ExactInterval current = start;
    for (std::int64_t step = 0;; ++step) {
        if (current.hi <= threshold) {
            report.outcome = StreamReport::Outcome::Reached;
            report.step = step;
            break;
        }
        if (step == max_steps) {
            report.outcome = StreamReport::Outcome::NotReached;
            report.step = step;
            break;
        }
        auto [first, last] = nearest_range(current);
        if (first != last) {
            report.outcome = StreamReport::Outcome::PrecisionExhausted;
            report.step = step;
            break;
        }
        const bool odd = mpz_odd_p(first.get_mpz_t()) != 0;
        report.parities.bits.push_back(odd ? 1 : 0);
        current = current.scaled(odd ? kThreeHalves : kHalf);
        ++report.steps_computed;
    }
    report.final_interval = std::move(current);
    return report;
}

std::string stream_report_json(const StreamReport& report, std::uint64_t seed, std::size_t prefix_length) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["rng"] = std::string(kRngAlgorithm);
    j["seed"] = seed;
    j["prefix_length"] = prefix_length;
    j["outcome"] = to_string(report.outcome);
    j["step"] = report.step;
    j["steps_computed"] = report.steps_computed;
    j["odd_steps"] = report.parities.weight();
    return j.dump(2);
}

const Rational& PatternCellTable::measure(const ParityVector& pattern) const {
    if (static_cast<int>(pattern.size()) != depth) {
        throw DomainError("pattern length does not match table depth");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern.bits[i]) {
            index |= std::size_t{1} << i;
        }
    }
    return measures.at(index);
}

std::string PatternCellTable::pattern_string(std::size_t index, int depth) {
    std::string s;
    for (int i = 0; i < depth; ++i) {
        s.push_back(((index >> i) & 1U) ? '1' : '0');
    }
    return s;
}

Rational PatternCellTable::total() const {
    Rational sum = 0;
    for (const auto& m : measures) {
        sum += m;
    }
    return sum;
}

Rational PatternCellTable::fraction_weight_at_least(const Rational& w) const {
    Rational sum = 0;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        if (Rational(__builtin_popcountll(i)) >= w) {
            sum += measures[i];
        }
    }
    return sum / total();
}

Rational PatternCellTable::fraction_weight_at_most(const Rational& w) const {
    Rational sum = 0;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        if (Rational(__builtin_popcountll(i)) <= w) {
            sum += measures[i];
        }
    }
    return sum / total();
}

std::string PatternCellTable::to_csv() const {
    std::ostringstream os;
    os << "pattern,measure\n";
    for (std::size_t i = 0; i < measures.size(); ++i) {
        os << pattern_string(i, depth) << ',' << measures[i].get_num().get_str() << '/'
           << measures[i].get_den().get_str() << '\n';
    }
    return os.str();
}

namespace {

// Depth-first subdivision. Each piece is tracked in image coordinates; its
// pre-image length is the image length times 2^depth / 3^weight.
class CellSplitter {
public:
    CellSplitter(int depth, std::vector<Rational>& cells) : depth_(depth), cells_(cells) {
        for (int i = 0; i <= depth; ++i) {
            BigInt p;
            mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(i));
            pow3_.push_back(p);
        }
    }

    void split(const ExactInterval& image, int level, std::size_t pattern, int weight) {
        if (level == depth_) {
            Rational m = image.width();
            m *= Rational(BigInt(1) << level, pow3_[static_cast<std::size_t>(weight)]);
            cells_[pattern] += m;
            return;
        }
        auto [first, last] = nearest_range(image);
        for (BigInt m = first; m <= last; ++m) {
            const Rational cell_lo = Rational(m) - kHalf;
            const Rational cell_hi = Rational(m) + kHalf;
            ExactInterval piece;
            if (cell_lo >= image.lo) {
                piece.lo = cell_lo;
                piece.lo_open = true;
            } else {
                piece.lo = image.lo;
                piece.lo_open = image.lo_open;
            }
            if (cell_hi < image.hi) {
                piece.hi = cell_hi;
                piece.hi_open = false;
            } else {
                piece.hi = image.hi;
                piece.hi_open = image.hi_open;
            }
            if (piece.lo >= piece.hi) {
                continue; // empty or a single point: measure zero
            }
            const bool odd = mpz_odd_p(m.get_mpz_t()) != 0;
            const std::size_t next_pattern = pattern | (odd ? (std::size_t{1} << level) : 0);
            split(piece.scaled(odd ? kThreeHalves : kHalf), level + 1, next_pattern, weight + (odd ? 1 : 0));
        }
    }

private:
    int depth_;
    std::vector<Rational>& cells_;
    std::vector<BigInt> pow3_;
};

} // namespace

PatternCellTable pattern_cells(const Rational& base, int depth, int cap) {
    if (depth < 0 || depth > cap) {
        throw DomainError("pattern depth " + std::to_string(depth) + " outside [0, " + std::to_string(cap) + "]");
    }
    if (sgn(base) < 0) {
        throw DomainError("pattern base must be non-negative");
    }
    PatternCellTable table;
    table.depth = depth;
    table.base = base;
    table.measures.assign(std::size_t{1} << depth, Rational(0));
    const Rational top = base + Rational(BigInt(1) << depth);
    CellSplitter splitter(depth, table.measures);
    splitter.split(ExactInterval::make(base, top, false, true), 0, 0, 0);
    return table;
}

} // namespace rcollatz
