#include <rcollatz/gf2_poly.hpp>

#include <bit>
#include <stdexcept>

namespace rcollatz {

namespace {

// 64x64 -> 128 carry-less product as (low, high).
std::pair<std::uint64_t, std::uint64_t> clmul64(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    while (b != 0) {
        const int i = std::countr_zero(b);
        lo ^= a << i;
        if (i != 0) {
            hi ^= a >> (64 - i);
        }
        b &= b - 1;
    }
    return {lo, hi};
}

const GF2Poly kOne = GF2Poly::from_bits(1);
const GF2Poly kX = GF2Poly::from_bits(2);
const GF2Poly kXPlusOne = GF2Poly::from_bits(3);

} // namespace

GF2Poly::GF2Poly(std::vector<std::uint64_t> words) : words_(std::move(words)) { trim(); }

GF2Poly GF2Poly::monomial(std::size_t degree) {
    std::vector<std::uint64_t> w(degree / 64 + 1, 0);
    w.back() = std::uint64_t{1} << (degree % 64);
    return GF2Poly(std::move(w));
}

GF2Poly GF2Poly::from_hex(std::string_view hex) {
    if (hex.substr(0, 2) == "0x" || hex.substr(0, 2) == "0X") {
        hex.remove_prefix(2);
    }
    if (hex.empty()) {
        throw ParseError("empty hex polynomial");
    }
    std::vector<std::uint64_t> words((hex.size() + 15) / 16, 0);
    std::size_t nibble = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++nibble) {
        const char c = *it;
        std::uint64_t v = 0;
        if (c >= '0' && c <= '9') {
            v = static_cast<std::uint64_t>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            v = static_cast<std::uint64_t>(c - 'a' + 10);
        } else if (c >= 'A' && c <= 'F') {
            v = static_cast<std::uint64_t>(c - 'A' + 10);
        } else {
            throw ParseError("not a hex digit: '" + std::string(1, c) + "'");
        }
        words[nibble / 16] |= v << (4 * (nibble % 16));
    }
    return GF2Poly(std::move(words));
}

void GF2Poly::trim() {
    while (!words_.empty() && words_.back() == 0) {
        words_.pop_back();
    }
}

int GF2Poly::degree() const noexcept {
    if (words_.empty()) {
        return -1;
    }
    return static_cast<int>(64 * (words_.size() - 1)) + 63 - std::countl_zero(words_.back());
}

bool GF2Poly::coeff(std::size_t i) const noexcept {
    const std::size_t w = i / 64;
    return w < words_.size() && ((words_[w] >> (i % 64)) & 1U) != 0;
}

bool GF2Poly::at_one() const noexcept {
    int ones = 0;
    for (auto w : words_) {
        ones += std::popcount(w);
    }
    return ones % 2 == 1;
}

GF2Poly GF2Poly::shifted_left(std::size_t n) const {
    if (is_zero()) {
        return {};
    }
    const std::size_t ws = n / 64;
    const std::size_t bs = n % 64;
    std::vector<std::uint64_t> out(words_.size() + ws + 1, 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out[i + ws] |= words_[i] << bs;
        if (bs != 0) {
            out[i + ws + 1] |= words_[i] >> (64 - bs);
        }
    }
    return GF2Poly(std::move(out));
}

GF2Poly GF2Poly::shifted_right(std::size_t n) const {
    const std::size_t ws = n / 64;
    const std::size_t bs = n % 64;
    if (ws >= words_.size()) {
        return {};
    }
    std::vector<std::uint64_t> out(words_.size() - ws, 0);
    for (std::size_t i = ws; i < words_.size(); ++i) {
        out[i - ws] |= words_[i] >> bs;
        if (bs != 0 && i + 1 < words_.size()) {
            out[i - ws] |= words_[i + 1] << (64 - bs);
        }
    }
    return GF2Poly(std::move(out));
}

std::string GF2Poly::to_hex() const {
    if (is_zero()) {
        return "0";
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    for (int nib = degree() / 4; nib >= 0; --nib) {
        const auto n = static_cast<std::size_t>(nib);
        s.push_back(kHex[(words_[n / 16] >> (4 * (n % 16))) & 0xF]);
    }
    return s;
}

std::string GF2Poly::to_string() const {
    if (is_zero()) {
        return "0";
    }
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        if (!coeff(static_cast<std::size_t>(i))) {
            continue;
        }
        if (!s.empty()) {
            s += " + ";
        }
        s += i == 0 ? "1" : (i == 1 ? "x" : "x^" + std::to_string(i));
    }
    return s;
}

GF2Poly operator+(const GF2Poly& a, const GF2Poly& b) {
    std::vector<std::uint64_t> out(std::max(a.words_.size(), b.words_.size()), 0);
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        out[i] ^= a.words_[i];
    }
    for (std::size_t i = 0; i < b.words_.size(); ++i) {
        out[i] ^= b.words_[i];
    }
    return GF2Poly(std::move(out));
}

GF2Poly operator*(const GF2Poly& a, const GF2Poly& b) {
    if (a.is_zero() || b.is_zero()) {
        return {};
    }
    std::vector<std::uint64_t> out(a.words_.size() + b.words_.size(), 0);
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        for (std::size_t j = 0; j < b.words_.size(); ++j) {
            auto [lo, hi] = clmul64(a.words_[i], b.words_[j]);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
    return GF2Poly(std::move(out));
}

std::pair<GF2Poly, GF2Poly> divmod(const GF2Poly& a, const GF2Poly& b) {
    if (b.is_zero()) {
        throw DomainError("division by the zero polynomial");
    }
    GF2Poly quotient;
    GF2Poly rest = a;
    const int db = b.degree();
    while (rest.degree() >= db) {
        const auto shift = static_cast<std::size_t>(rest.degree() - db);
        quotient = quotient + GF2Poly::monomial(shift);
        rest = rest + b.shifted_left(shift);
    }
    return {quotient, rest};
}

GF2Poly exact_divide(const GF2Poly& a, const GF2Poly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) {
        throw std::logic_error(b.to_string() + " does not divide " + a.to_string());
    }
    return q;
}

GF2Poly s_map(const GF2Poly& f) {
    if (!f.at_one()) {
        return exact_divide(f, kXPlusOne);
    }
    return exact_divide(kX * f + kOne, kXPlusOne);
}

GF2Poly s0_map(const GF2Poly& f) {
    if (!f.at_zero()) {
        return f.shifted_right(1);
    }
    return (kXPlusOne * f + kOne).shifted_right(1);
}

GF2Poly s1_map(const GF2Poly& f) {
    if (!f.at_zero()) {
        return f.shifted_right(1);
    }
    return kXPlusOne * f + kOne;
}

GF2Poly shift_argument(const GF2Poly& f) {
    GF2Poly acc;
    for (int i = f.degree(); i >= 0; --i) {
        acc = acc * kXPlusOne;
        if (f.coeff(static_cast<std::size_t>(i))) {
            acc = acc + kOne;
        }
    }
    return acc;
}

namespace {

template <typename Check>
SweepResult sweep(int max_degree, Check&& check) {
    if (max_degree < 0 || max_degree > 62) {
        throw DomainError("sweep degree must lie in [0, 62]");
    }
    SweepResult result;
    const std::uint64_t count = std::uint64_t{1} << (max_degree + 1);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const auto f = GF2Poly::from_bits(bits);
        ++result.checked;
        if (!check(f)) {
            result.pass = false;
            result.counterexample = f;
            break;
        }
    }
    return result;
}

} // namespace

SweepResult conjugacy_check(int max_degree) {
    return sweep(max_degree, [](const GF2Poly& f) { return shift_argument(s_map(f)) == s0_map(shift_argument(f)); });
}

SweepResult acceleration_check(int max_degree) {
    return sweep(max_degree, [](const GF2Poly& f) {
        if (f.at_zero()) {
            return kX * s0_map(f) == s1_map(f);
        }
        return s0_map(f) == s1_map(f);
    });
}

GF2Poly word_to_poly(const BalancedWord& w) {
    if (!w.is_integral()) {
        throw FractionalWord();
    }
    const auto& d = w.digits();
    std::vector<std::uint64_t> words(d.size() / 64 + 1, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t power = d.size() - 1 - i;
        if (d[i] == Digit::Minus) {
            throw DomainError("two-letter words use only + and 0");
        }
        if (d[i] == Digit::Plus) {
            words[power / 64] |= std::uint64_t{1} << (power % 64);
        }
    }
    return GF2Poly(std::move(words));
}

BalancedWord poly_to_word(const GF2Poly& f) {
    std::vector<Digit> d;
    for (int i = f.degree(); i >= 0; --i) {
        d.push_back(f.coeff(static_cast<std::size_t>(i)) ? Digit::Plus : Digit::Zero);
    }
    return BalancedWord(std::move(d));
}

BalancedWord binary_word_map(const BalancedWord& w) {
    const BalancedWord even = word_parity(w) == Parity::Even ? w : w.appended(Digit::Plus);
    std::vector<Digit> out;
    for (const Block& b : parse_blocks(even)) {
        if (b.kind == Block::Kind::ZeroRun) {
            out.insert(out.end(), b.zeros, Digit::Zero);
            continue;
        }
        if (b.lead != Digit::Plus || b.trail != Digit::Plus) {
            throw DomainError("two-letter words use only + and 0");
        }
        out.push_back(Digit::Zero);
        out.insert(out.end(), b.zeros + 1, Digit::Plus);
    }
    return BalancedWord(std::move(out)).canonical();
}

} // namespace rcollatz
