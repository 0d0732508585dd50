#include <rcollatz/literal.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rcollatz {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool all_decimal(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

BigInt parse_big(std::string_view s) {
    if (!all_decimal(s)) {
        throw ParseError("not a decimal integer: '" + std::string(s) + "'");
    }
    return BigInt(std::string(s), 10);
}

// integer or a^b
BigInt parse_term(std::string_view s) {
    const auto caret = s.find('^');
    if (caret == std::string_view::npos) {
        return parse_big(s);
    }
    const BigInt base = parse_big(s.substr(0, caret));
    const std::int64_t e = parse_integer(s.substr(caret + 1));
    if (e < 0 || e > (std::int64_t{1} << 24)) {
        throw ParseError("exponent out of range in '" + std::string(s) + "'");
    }
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
    return out;
}

bool looks_like_word(std::string_view s) {
    const bool alphabet = std::all_of(s.begin(), s.end(), [](char c) { return c == '+' || c == '-' || c == '0' || c == '.'; });
    const bool marked = s.find_first_of("+-.") != std::string_view::npos;
    return alphabet && marked;
}

} // namespace

std::int64_t parse_integer(std::string_view text) {
    text = trim(text);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("not an integer: '" + std::string(text) + "'");
    }
    return v;
}

Rational parse_rational(std::string_view text) {
    text = trim(text);
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    const auto slash = text.find('/');
    const BigInt num = parse_term(text.substr(0, slash));
    const BigInt den = slash == std::string_view::npos ? BigInt(1) : parse_term(text.substr(slash + 1));
    if (den == 0) {
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    }
    Rational q(negative ? BigInt(-num) : num, den);
    q.canonicalize();
    return q;
}

std::vector<Rational> parse_rational_list(std::string_view text) {
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(parse_rational(text.substr(start, end - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text) {
    // The first ':' after position 0 separates, so "-3:2" and "2:-3" both work.
    const auto colon = text.find(':', 1);
    if (colon == std::string_view::npos) {
        throw ParseError("expected a range a:b, got '" + std::string(text) + "'");
    }
    return {parse_integer(text.substr(0, colon)), parse_integer(text.substr(colon + 1))};
}

TernaryDyadic parse_x_literal(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        throw ParseError("empty x literal; expected " + std::string(kXLiteralGrammar));
    }
    try {
        if (looks_like_word(text)) {
            return TernaryDyadic::from_rational(BalancedWord::parse(text).value());
        }
        if (all_decimal(text)) {
            return TernaryDyadic(parse_big(text));
        }
        if (text.find('*') != std::string_view::npos) {
            return TernaryDyadic::parse(text);
        }
        return TernaryDyadic::from_rational(parse_rational(text));
    } catch (const ParseError& e) {
        throw ParseError("cannot parse x literal '" + std::string(text) + "' (" + e.what() + "); expected " +
                         std::string(kXLiteralGrammar));
    }
}

FlatConfig FlatConfig::parse(std::string_view text) {
    FlatConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        if (!cfg.values_.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

FlatConfig FlatConfig::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::string& FlatConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing config key '" + key + "'");
    }
    return it->second;
}

std::int64_t FlatConfig::integer(const std::string& key) const {
    try {
        return parse_integer(require(key));
    } catch (const ParseError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

std::int64_t FlatConfig::integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::uint64_t FlatConfig::unsigned_integer(const std::string& key) const {
    const std::string& s = require(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("key '" + key + "': not an unsigned 64-bit integer: '" + s + "'");
    }
    return v;
}

Rational FlatConfig::rational(const std::string& key) const {
    try {
        return parse_rational(require(key));
    } catch (const ParseError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

Rational FlatConfig::rational(const std::string& key, const Rational& fallback) const {
    return has(key) ? rational(key) : fallback;
}

std::string FlatConfig::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? require(key) : fallback;
}

void FlatConfig::reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (allowed.count(key) == 0) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

} // namespace rcollatz
