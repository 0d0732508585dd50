#include <rcollatz/balanced_word.hpp>

#include <algorithm>

namespace rcollatz {

namespace {

// Least-significant-first balanced digits of a (possibly negative) integer,
// stopping at zero unless `count` digits are requested.
std::vector<Digit> balanced_lsf(BigInt m, std::size_t count, bool exact_count) {
    std::vector<Digit> out;
    while (exact_count ? out.size() < count : sgn(m) != 0) {
        const unsigned long r = mpz_fdiv_ui(m.get_mpz_t(), 3);
        Digit d = r == 0 ? Digit::Zero : (r == 1 ? Digit::Plus : Digit::Minus);
        m -= value_of(d);
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), 3);
        out.push_back(d);
    }
    return out;
}

BigInt horner(const std::vector<Digit>& digits) {
    BigInt acc = 0;
    for (Digit d : digits) {
        acc *= 3;
        acc += value_of(d);
    }
    return acc;
}

} // namespace

Digit digit_from_char(char c) {
    switch (c) {
    case '+':
        return Digit::Plus;
    case '-':
        return Digit::Minus;
    case '0':
        return Digit::Zero;
    default:
        throw ParseError(std::string("not a balanced ternary digit: '") + c + "' (expected +, - or 0)");
    }
}

BalancedWord::BalancedWord(std::vector<Digit> digits, std::int64_t point_offset)
    : digits_(std::move(digits)), point_offset_(point_offset) {
    if (point_offset_ < 0) {
        throw DomainError("point offset must be non-negative");
    }
    if (digits_.empty()) {
        digits_.push_back(Digit::Zero);
    }
}

BalancedWord BalancedWord::parse(std::string_view text) {
    std::vector<Digit> digits;
    std::int64_t offset = 0;
    bool seen_point = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_point) {
                throw ParseError("more than one radix point in '" + std::string(text) + "'");
            }
            seen_point = true;
            continue;
        }
        digits.push_back(digit_from_char(c));
        if (seen_point) {
            ++offset;
        }
    }
    if (digits.empty()) {
        throw ParseError("empty balanced ternary word");
    }
    return BalancedWord(std::move(digits), offset);
}

BalancedWord BalancedWord::canonical() const {
    std::vector<Digit> d = digits_;
    const auto keep = static_cast<std::size_t>(point_offset_) + 1;
    while (d.size() < keep) {
        d.insert(d.begin(), Digit::Zero);
    }
    std::size_t lead = 0;
    while (d.size() - lead > keep && d[lead] == Digit::Zero) {
        ++lead;
    }
    d.erase(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(lead));
    return BalancedWord(std::move(d), point_offset_);
}

std::string BalancedWord::to_string() const {
    std::string s;
    const auto int_digits = static_cast<std::int64_t>(digits_.size()) - point_offset_;
    if (int_digits <= 0) {
        s.push_back('.');
    }
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (static_cast<std::int64_t>(i) == int_digits && point_offset_ > 0 && int_digits > 0) {
            s.push_back('.');
        }
        s.push_back(to_char(digits_[i]));
    }
    return s;
}

Rational BalancedWord::value() const {
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 3, static_cast<unsigned long>(point_offset_));
    Rational q(horner(digits_), den);
    q.canonicalize();
    return q;
}

BalancedWord BalancedWord::appended(Digit d) const {
    auto digits = digits_;
    digits.push_back(d);
    return BalancedWord(std::move(digits), point_offset_);
}

std::vector<Digit> Block::spell() const {
    std::vector<Digit> out;
    if (kind == Kind::ZeroRun) {
        out.assign(zeros, Digit::Zero);
        return out;
    }
    out.push_back(lead);
    out.insert(out.end(), zeros, Digit::Zero);
    out.push_back(trail);
    return out;
}

std::string Block::to_string() const {
    if (kind == Kind::ZeroRun) {
        return "Z(" + std::to_string(zeros) + ")";
    }
    return std::string("B(") + to_char(lead) + "," + std::to_string(zeros) + "," + to_char(trail) + ")";
}

BalancedWord int_to_bt(const BigInt& n) {
    if (sgn(n) < 0) {
        throw DomainError("int_to_bt expects a non-negative integer");
    }
    auto lsf = balanced_lsf(n, 0, false);
    std::reverse(lsf.begin(), lsf.end());
    return BalancedWord(std::move(lsf));
}

BigInt bt_to_int(const BalancedWord& w) {
    if (!w.is_integral()) {
        throw FractionalWord();
    }
    return horner(w.digits());
}

Parity word_parity(const BalancedWord& w) {
    const auto nonzero = std::count_if(w.digits().begin(), w.digits().end(), [](Digit d) { return d != Digit::Zero; });
    return nonzero % 2 == 0 ? Parity::Even : Parity::Odd;
}

std::vector<Block> parse_blocks(const BalancedWord& w) {
    if (word_parity(w) == Parity::Odd) {
        throw OddWord();
    }
    const auto& d = w.digits();
    std::vector<Block> blocks;
    std::size_t i = 0;
    while (i < d.size()) {
        if (d[i] == Digit::Zero) {
            std::size_t run = 0;
            while (i < d.size() && d[i] == Digit::Zero) {
                ++run;
                ++i;
            }
            blocks.push_back(Block::zero_run(run));
            continue;
        }
        const Digit lead = d[i++];
        std::size_t zeros = 0;
        while (d[i] == Digit::Zero) {
            ++zeros;
            ++i;
        }
        blocks.push_back(Block::pair(lead, zeros, d[i++]));
    }
    return blocks;
}

BalancedWord halve_even_word(const BalancedWord& w) {
    std::vector<Digit> out;
    out.reserve(w.size());
    for (const Block& b : parse_blocks(w)) {
        if (b.kind == Block::Kind::ZeroRun) {
            out.insert(out.end(), b.zeros, Digit::Zero);
        } else if (b.lead == b.trail) {
            // a 0^j a -> a (-a)^(j+1)
            out.push_back(b.lead);
            out.insert(out.end(), b.zeros + 1, negate(b.lead));
        } else {
            // a 0^j (-a) -> 0 a^(j+1)
            out.push_back(Digit::Zero);
            out.insert(out.end(), b.zeros + 1, b.lead);
        }
    }
    return BalancedWord(std::move(out), w.point_offset()).canonical();
}

BalancedWord collatz_word_step(const BalancedWord& w) {
    if (!w.is_integral()) {
        throw FractionalWord();
    }
    return halve_even_word(word_parity(w) == Parity::Even ? w : w.appended(Digit::Plus));
}

BigInt collatz_int_step(const BigInt& n) {
    BigInt out;
    if (mpz_even_p(n.get_mpz_t())) {
        mpz_fdiv_q_2exp(out.get_mpz_t(), n.get_mpz_t(), 1);
    } else {
        out = 3 * n + 1;
        mpz_fdiv_q_2exp(out.get_mpz_t(), out.get_mpz_t(), 1);
    }
    return out;
}

BigInt head_at(const Rational& q, std::int64_t z) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(z < 0 ? -z : z));
    return nearest_int(z < 0 ? Rational(q * p) : Rational(q / p));
}

std::vector<Digit> digits_of_rational(const Rational& q, std::int64_t hi, std::int64_t lo) {
    if (hi < lo) {
        throw DomainError("digit window needs hi >= lo");
    }
    auto lsf = balanced_lsf(head_at(q, lo), static_cast<std::size_t>(hi - lo + 1), true);
    std::reverse(lsf.begin(), lsf.end());
    return lsf;
}

std::vector<Digit> digits_of_ternary_dyadic(const TernaryDyadic& x, std::int64_t hi, std::int64_t lo) {
    return digits_of_rational(x.to_rational(), hi, lo);
}

std::string render_window(const std::vector<Digit>& digits, std::int64_t hi, std::int64_t lo) {
    std::string s;
    if (hi < 0) {
        s.push_back('.');
    }
    std::int64_t pos = hi;
    for (Digit d : digits) {
        s.push_back(to_char(d));
        if (pos == 0 && lo < 0) {
            s.push_back('.');
        }
        --pos;
    }
    return s;
}

} // namespace rcollatz
