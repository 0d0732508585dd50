#include <rcollatz/ternary_dyadic.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rcollatz {

namespace {

BigInt pow3(std::uint64_t e) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), 3, e);
    return out;
}

BigInt shifted(const BigInt& v, std::uint64_t bits) {
    BigInt out;
    mpz_mul_2exp(out.get_mpz_t(), v.get_mpz_t(), bits);
    return out;
}

// value * 3^j3 * 2^j2 for non-negative exponents
BigInt scale_up(const BigInt& v, std::int64_t j3, std::int64_t j2) {
    BigInt out = v;
    if (j3 > 0) {
        out *= pow3(static_cast<std::uint64_t>(j3));
    }
    if (j2 > 0) {
        mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), static_cast<std::uint64_t>(j2));
    }
    return out;
}

std::int64_t parse_int64(std::string_view text, std::string_view what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("bad " + std::string(what) + " exponent '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

TernaryDyadic::TernaryDyadic(BigInt n, std::int64_t three_exp, std::int64_t two_exp)
    : n_(std::move(n)), j_(three_exp), k_(two_exp) {
    if (sgn(n_) <= 0) {
        throw DomainError("TernaryDyadic requires a positive significand");
    }
    if (mpz_even_p(n_.get_mpz_t())) {
        const auto twos = mpz_scan1(n_.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(n_.get_mpz_t(), n_.get_mpz_t(), twos);
        k_ -= static_cast<std::int64_t>(twos);
    }
    if (mpz_divisible_ui_p(n_.get_mpz_t(), 3)) {
        const auto threes = mpz_remove(n_.get_mpz_t(), n_.get_mpz_t(), BigInt(3).get_mpz_t());
        j_ += static_cast<std::int64_t>(threes);
    }
}

TernaryDyadic TernaryDyadic::from_rational(const Rational& q) {
    if (sgn(q) <= 0) {
        throw DomainError("TernaryDyadic requires a positive value");
    }
    BigInt den = q.get_den();
    std::int64_t twos = 0;
    std::int64_t threes = 0;
    if (mpz_even_p(den.get_mpz_t())) {
        const auto t = mpz_scan1(den.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(den.get_mpz_t(), den.get_mpz_t(), t);
        twos = static_cast<std::int64_t>(t);
    }
    threes = static_cast<std::int64_t>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(), BigInt(3).get_mpz_t()));
    if (den != 1) {
        throw DomainError("denominator of " + q.get_str() + " is not of the form 2^a * 3^b");
    }
    return TernaryDyadic(q.get_num(), -threes, twos);
}

TernaryDyadic TernaryDyadic::parse(std::string_view text) {
    const auto star = text.find('*');
    const auto slash = text.find('/');
    const auto n_end = std::min(star, slash);
    const std::string n_text(text.substr(0, n_end));
    if (n_text.empty() || n_text.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError("expected decimal significand in '" + std::string(text) + "'");
    }
    BigInt n(n_text, 10);
    std::int64_t j = 0;
    std::int64_t k = 0;
    if (star != std::string_view::npos) {
        if (slash != std::string_view::npos && slash < star) {
            throw ParseError("expected n*3^j/2^k, got '" + std::string(text) + "'");
        }
        auto part = text.substr(star + 1, slash == std::string_view::npos ? std::string_view::npos : slash - star - 1);
        if (part.substr(0, 2) != "3^") {
            throw ParseError("expected '*3^j' in '" + std::string(text) + "'");
        }
        j = parse_int64(part.substr(2), "three");
    }
    if (slash != std::string_view::npos) {
        auto part = text.substr(slash + 1);
        if (part.substr(0, 2) != "2^") {
            throw ParseError("expected '/2^k' in '" + std::string(text) + "'");
        }
        k = parse_int64(part.substr(2), "two");
    }
    return TernaryDyadic(std::move(n), j, k);
}

Rational TernaryDyadic::to_rational() const {
    Rational q(scale_up(n_, j_, -k_), scale_up(BigInt(1), -j_, k_));
    q.canonicalize();
    return q;
}

std::string TernaryDyadic::to_string() const {
    return n_.get_str() + "*3^" + std::to_string(j_) + "/2^" + std::to_string(k_);
}

double TernaryDyadic::log2() const {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, n_.get_mpz_t());
    return std::log2(mant) + static_cast<double>(exp) + static_cast<double>(j_) * std::log2(3.0) -
           static_cast<double>(k_);
}

std::strong_ordering operator<=>(const TernaryDyadic& a, const TernaryDyadic& b) {
    if (a == b) {
        return std::strong_ordering::equal;
    }
    const BigInt lhs = scale_up(a.n_, a.j_ - b.j_, b.k_ - a.k_);
    const BigInt rhs = scale_up(b.n_, b.j_ - a.j_, a.k_ - b.k_);
    return cmp(lhs, rhs) <=> 0;
}

int compare(const TernaryDyadic& x, const Rational& q) {
    if (sgn(q) <= 0) {
        return 1;
    }
    const std::int64_t j = x.three_exp();
    const std::int64_t k = x.two_exp();
    const BigInt lhs = scale_up(x.significand(), j, -k) * q.get_den();
    const BigInt rhs = scale_up(q.get_num(), -j, k);
    const int c = cmp(lhs, rhs);
    return (c > 0) - (c < 0);
}

BigInt nearest_int(const Rational& q) {
    // ceil((2p - d) / 2d)
    BigInt num = 2 * q.get_num() - q.get_den();
    BigInt den = 2 * q.get_den();
    BigInt out;
    mpz_cdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

BigInt nearest_int(const TernaryDyadic& x) { return OrbitCursor(x).nearest(); }

std::string approx_decimal(const Rational& q, int digits) {
    if (sgn(q) == 0) {
        return "0";
    }
    Rational a = abs(q);
    const auto bits = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
                      static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 2));
    long e10 = static_cast<long>(std::floor(static_cast<double>(bits) * std::log10(2.0)));
    auto pow10 = [](long e) {
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
        return e < 0 ? Rational(BigInt(1), p) : Rational(p);
    };
    while (a < pow10(e10)) {
        --e10;
    }
    while (a >= pow10(e10 + 1)) {
        ++e10;
    }
    Rational scaled = a * pow10(digits - 1 - e10);
    BigInt mant;
    mpz_fdiv_q(mant.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    const std::string s = mant.get_str();
    std::string out = sgn(q) < 0 ? "-" : "";
    out += s.substr(0, 1);
    if (s.size() > 1) {
        out += "." + s.substr(1);
    }
    out += (e10 < 0 ? "e-" : "e+") + std::to_string(e10 < 0 ? -e10 : e10);
    return out;
}

std::string approx_decimal(const TernaryDyadic& x, int digits) { return approx_decimal(x.to_rational(), digits); }

TernaryDyadic col_step(const TernaryDyadic& x) {
    const bool odd = mpz_odd_p(nearest_int(x).get_mpz_t()) != 0;
    return x.scaled(odd ? 1 : 0, 1);
}

std::size_t ParityVector::weight() const noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string ParityVector::to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

OrbitCursor::OrbitCursor(const TernaryDyadic& x, std::size_t bit_ceiling)
    : n_(x.significand()), j_(x.three_exp()), k_(x.two_exp()), ceiling_(bit_ceiling) {
    numer_ = scale_up(n_, j_, -k_);
    three_den_ = j_ < 0 ? pow3(static_cast<std::uint64_t>(-j_)) : BigInt(1);
    two_den_ = k_ > 0 ? k_ : 0;
    if (mpz_sizeinbase(numer_.get_mpz_t(), 2) > ceiling_ || mpz_sizeinbase(three_den_.get_mpz_t(), 2) > ceiling_) {
        throw ResourceCeiling("initial value exceeds the bit-length ceiling");
    }
}

BigInt OrbitCursor::nearest() const {
    BigInt out;
    if (three_den_ == 1) {
        if (two_den_ == 0) {
            return numer_;
        }
        const auto e = static_cast<mp_bitcnt_t>(two_den_);
        mpz_fdiv_q_2exp(out.get_mpz_t(), numer_.get_mpz_t(), e);
        // low e bits exceed 2^(e-1) -> round up
        if (mpz_tstbit(numer_.get_mpz_t(), e - 1) && mpz_scan1(numer_.get_mpz_t(), 0) < e - 1) {
            out += 1;
        }
        return out;
    }
    scratch_ = shifted(numer_, 1) - shifted(three_den_, static_cast<std::uint64_t>(two_den_));
    BigInt den = shifted(three_den_, static_cast<std::uint64_t>(two_den_) + 1);
    mpz_cdiv_q(out.get_mpz_t(), scratch_.get_mpz_t(), den.get_mpz_t());
    return out;
}

bool OrbitCursor::nearest_is_odd() const {
    if (three_den_ == 1) {
        if (two_den_ == 0) {
            return mpz_odd_p(numer_.get_mpz_t()) != 0;
        }
        const auto e = static_cast<mp_bitcnt_t>(two_den_);
        const bool high = mpz_tstbit(numer_.get_mpz_t(), e) != 0;
        const bool carry = mpz_tstbit(numer_.get_mpz_t(), e - 1) && mpz_scan1(numer_.get_mpz_t(), 0) < e - 1;
        return high != carry;
    }
    return mpz_odd_p(nearest().get_mpz_t()) != 0;
}

int OrbitCursor::compare(const Rational& q) const {
    if (sgn(q) <= 0) {
        return 1;
    }
    const auto lhs_bits = mpz_sizeinbase(numer_.get_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
    const auto rhs_bits = mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(three_den_.get_mpz_t(), 2) +
                          static_cast<std::size_t>(two_den_);
    if (lhs_bits > rhs_bits + 1) {
        return 1;
    }
    if (rhs_bits > lhs_bits + 1) {
        return -1;
    }
    const BigInt lhs = numer_ * q.get_den();
    const BigInt rhs = shifted(q.get_num() * three_den_, static_cast<std::uint64_t>(two_den_));
    const int c = cmp(lhs, rhs);
    return (c > 0) - (c < 0);
}

double OrbitCursor::log2() const {
    long e1 = 0;
    long e2 = 0;
    const double m1 = mpz_get_d_2exp(&e1, numer_.get_mpz_t());
    const double m2 = mpz_get_d_2exp(&e2, three_den_.get_mpz_t());
    return std::log2(m1) + static_cast<double>(e1) - std::log2(m2) - static_cast<double>(e2) -
           static_cast<double>(two_den_);
}

bool OrbitCursor::step() {
    const bool odd = nearest_is_odd();
    if (odd) {
        if (j_ < 0) {
            mpz_divexact_ui(three_den_.get_mpz_t(), three_den_.get_mpz_t(), 3);
        } else {
            numer_ *= 3;
        }
        ++j_;
        ++odd_steps_;
    }
    if (k_ < 0) {
        mpz_fdiv_q_2exp(numer_.get_mpz_t(), numer_.get_mpz_t(), 1);
    } else {
        ++two_den_;
    }
    ++k_;
    ++steps_;
    if (mpz_sizeinbase(numer_.get_mpz_t(), 2) > ceiling_ || static_cast<std::size_t>(two_den_) > ceiling_) {
        throw ResourceCeiling("orbit value exceeded the bit-length ceiling after " + std::to_string(steps_) +
                              " steps");
    }
    return odd;
}

std::vector<TernaryDyadic> orbit(const TernaryDyadic& x, std::int64_t steps, std::size_t bit_ceiling) {
    std::vector<TernaryDyadic> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    OrbitCursor cur(x, bit_ceiling);
    out.push_back(x);
    for (std::int64_t i = 0; i < steps; ++i) {
        cur.step();
        out.push_back(cur.value());
    }
    return out;
}

ParityVector parity_vector(const TernaryDyadic& x, std::int64_t steps, std::size_t bit_ceiling) {
    ParityVector pv;
    pv.bits.reserve(static_cast<std::size_t>(steps));
    OrbitCursor cur(x, bit_ceiling);
    for (std::int64_t i = 0; i < steps; ++i) {
        pv.bits.push_back(cur.step() ? 1 : 0);
    }
    return pv;
}

namespace {
const Rational kLowEnd(3, 4);
const Rational kMidPoint(3, 2);
const Rational kHighEnd(9, 4);
} // namespace

bool in_invariant_interval(const TernaryDyadic& x) { return compare(x, kLowEnd) > 0 && compare(x, kHighEnd) <= 0; }

std::int64_t t_exponent(const TernaryDyadic& x) {
    auto t = static_cast<std::int64_t>(std::llround(-x.log2() / std::log2(3.0)));
    while (compare(x.scaled(t, 0), kLowEnd) <= 0) {
        ++t;
    }
    while (compare(x.scaled(t, 0), kHighEnd) > 0) {
        --t;
    }
    return t;
}

TernaryDyadic project_pi(const TernaryDyadic& x) { return x.scaled(t_exponent(x), 0); }

TernaryDyadic t_map(const TernaryDyadic& x) {
    if (!in_invariant_interval(x)) {
        throw DomainError("T is defined on (3/4, 9/4] only, got " + x.to_string());
    }
    return compare(x, kMidPoint) <= 0 ? x.scaled(1, 1) : x.scaled(0, 1);
}

bool cmp3(const TernaryDyadic& x, const TernaryDyadic& y) {
    return x.significand() == y.significand() && x.two_exp() == y.two_exp() && y.three_exp() >= x.three_exp();
}

StoppingReport stopping_time(const TernaryDyadic& x, const Rational& threshold, std::int64_t max_steps,
                             std::size_t bit_ceiling) {
    if (sgn(threshold) <= 0) {
        throw DomainError("stopping threshold must be positive");
    }
    StoppingReport report{std::nullopt, x, 0, threshold};
    OrbitCursor cur(x, bit_ceiling);
    for (std::int64_t s = 0;; ++s) {
        if (cur.compare(threshold) <= 0) {
            report.tau = s;
        }
        const auto v = cur.value();
        if (v < report.min_value) {
            report.min_value = v;
        }
        if (report.tau || s == max_steps) {
            break;
        }
        cur.step();
    }
    report.steps_computed = cur.steps();
    return report;
}

std::string orbit_csv(const std::vector<TernaryDyadic>& values) {
    std::ostringstream os;
    os << "step,n,j,k,approx_decimal_60_digits\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& v = values[i];
        os << i << ',' << v.significand().get_str() << ',' << v.three_exp() << ',' << v.two_exp() << ','
           << approx_decimal(v, 60) << '\n';
    }
    return os.str();
}

} // namespace rcollatz
