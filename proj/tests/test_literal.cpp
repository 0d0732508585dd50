#include <rcollatz/literal.hpp>

#include <doctest.h>

using namespace rcollatz;

TEST_CASE("x literal forms") {
    CHECK(parse_x_literal("27").to_rational() == 27);
    CHECK(parse_x_literal(" 27 ").to_rational() == 27);
    CHECK(parse_x_literal("212/27").to_rational() == Rational(212, 27));
    CHECK(parse_x_literal("5/2^3").to_rational() == Rational(5, 8));
    CHECK(parse_x_literal("2^40").to_rational() == Rational(BigInt(1) << 40));
    CHECK(parse_x_literal("+--").to_rational() == 5);
    CHECK(parse_x_literal("+.+").to_rational() == Rational(4, 3));
    CHECK(parse_x_literal("12345678901234567890123").to_rational() == Rational(BigInt("12345678901234567890123")));
    CHECK_THROWS_AS(parse_x_literal("abc"), ParseError);
    CHECK_THROWS_AS(parse_x_literal(""), ParseError);
    CHECK_THROWS_AS(parse_x_literal("1/0"), ParseError);
    try {
        parse_x_literal("abc");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(std::string(kXLiteralGrammar)) != std::string::npos);
    }
}

TEST_CASE("rationals, integers and ranges") {
    CHECK(parse_rational("-3/4") == Rational(-3, 4));
    CHECK(parse_rational("6/8") == Rational(3, 4));
    CHECK(parse_rational("3^2/2^5") == Rational(9, 32));
    CHECK_THROWS_AS(parse_rational("1/"), ParseError);
    CHECK_THROWS_AS(parse_rational("x"), ParseError);
    const auto list = parse_rational_list("0,1/4, 1/2,3/4,1");
    REQUIRE(list.size() == 5);
    CHECK(list[1] == Rational(1, 4));
    CHECK(list[4] == 1);
    CHECK_THROWS_AS(parse_rational_list("1,,2"), ParseError);
    CHECK(parse_integer("-12") == -12);
    CHECK_THROWS_AS(parse_integer("12a"), ParseError);
    CHECK(parse_range("0:5") == std::pair<std::int64_t, std::int64_t>{0, 5});
    CHECK(parse_range("-3:2") == std::pair<std::int64_t, std::int64_t>{-3, 2});
    CHECK(parse_range("3:-3") == std::pair<std::int64_t, std::int64_t>{3, -3});
    CHECK_THROWS_AS(parse_range("5"), ParseError);
}

TEST_CASE("flat config") {
    const auto cfg = FlatConfig::parse("# comment\nseed = 42\n\nlo = 2^30  # trailing\nname = envelope\n");
    CHECK(cfg.has("seed"));
    CHECK_FALSE(cfg.has("hi"));
    CHECK(cfg.integer("seed") == 42);
    CHECK(cfg.unsigned_integer("seed") == 42);
    CHECK(cfg.rational("lo") == Rational(BigInt(1) << 30));
    CHECK(cfg.integer("missing", 7) == 7);
    CHECK(cfg.rational("missing", Rational(1, 2)) == Rational(1, 2));
    CHECK(cfg.text("name", "x") == "envelope");
    CHECK(cfg.values().size() == 3);
    CHECK_THROWS_AS(cfg.require("missing"), ConfigError);
    CHECK_THROWS_AS(cfg.integer("name"), ConfigError);
    CHECK_THROWS_AS(cfg.reject_unknown({"seed", "lo"}), ConfigError);
    CHECK_NOTHROW(cfg.reject_unknown({"seed", "lo", "name"}));
    CHECK_THROWS_AS(FlatConfig::parse("seed 42\n"), ConfigError);
    CHECK_THROWS_AS(FlatConfig::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(FlatConfig::parse(" = 2\n"), ConfigError);
    CHECK_THROWS_AS(FlatConfig::read_file("/nonexistent/config.txt"), ConfigError);
    CHECK_THROWS_AS(FlatConfig::parse("seed = -1\n").unsigned_integer("seed"), ConfigError);
}
