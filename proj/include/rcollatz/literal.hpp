#pragma once

// Shared text grammar for command-line values and the flat key-value config format.

#include <rcollatz/balanced_word.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rcollatz {

inline constexpr std::string_view kXLiteralGrammar =
    "decimal integer | n*3^j/2^k | p/q with q = 2^a*3^b | balanced word over {+,-,0,.}";

/// Parses an x-literal (see kXLiteralGrammar) into a positive TernaryDyadic.
TernaryDyadic parse_x_literal(std::string_view text);

/// "p", "p/q", where p and q are integers or powers "a^b"; optional leading '-'.
Rational parse_rational(std::string_view text);
/// Comma-separated rationals.
std::vector<Rational> parse_rational_list(std::string_view text);
std::int64_t parse_integer(std::string_view text);
/// "a:b"
std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text);

/// Lines of "key = value"; '#' starts a comment; blank lines are ignored.
class FlatConfig {
public:
    FlatConfig() = default;
    static FlatConfig parse(std::string_view text);
    static FlatConfig read_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& require(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    Rational rational(const std::string& key) const;
    Rational rational(const std::string& key, const Rational& fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;

    /// Throws ConfigError naming the first key not in `allowed`.
    void reject_unknown(const std::set<std::string>& allowed) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace rcollatz
