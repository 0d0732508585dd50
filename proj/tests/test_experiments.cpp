#include <rcollatz/experiments.hpp>

#include <doctest.h>

#include <cmath>

using namespace rcollatz;

namespace {

// Independent rational step: [y] = -floor(1/2 - y).
Rational oracle_step(const Rational& y) {
    Rational t = Rational(1, 2) - y;
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    const BigInt n = -f;
    return mpz_odd_p(n.get_mpz_t()) ? Rational(y * Rational(3, 2)) : Rational(y / 2);
}

Rational power(const Rational& q, long e) {
    Rational out = 1;
    for (long i = 0; i < e; ++i) {
        out *= q;
    }
    return out;
}

// Envelope with eps = 1/10 checked after raising everything to the 20th power.
std::optional<long> oracle_envelope_violation(const Rational& x) {
    long k_max = 0;
    while (power(Rational(4), k_max + 1) <= power(Rational(3), k_max + 1) * x * x) {
        ++k_max;
    }
    const Rational x18 = power(x, 18);
    const Rational x22 = power(x, 22);
    Rational y = x;
    for (long k = 0; k <= k_max; ++k) {
        const Rational scale = power(Rational(3, 4), 10 * k);
        const Rational y20 = power(y, 20);
        if (y20 < scale * x18 || y20 > scale * x22) {
            return k;
        }
        y = oracle_step(y);
    }
    return std::nullopt;
}

RemarkTestConfig small_config() {
    RemarkTestConfig cfg;
    cfg.seed = 11;
    cfg.trials = 30;
    cfg.b_exp = 12;
    cfg.prefix_len = static_cast<std::int64_t>(required_prefix_length(12, 300));
    cfg.max_steps = 300;
    return cfg;
}

} // namespace

TEST_CASE("stopping constant") {
    CHECK(stopping_constant() == doctest::Approx(2.0 / (2.0 - std::log(3.0) / std::log(2.0))).epsilon(1e-14));
    CHECK(stopping_constant() == doctest::Approx(4.8187).epsilon(1e-4));
}

TEST_CASE("sample_dyadic stays strictly inside with 128 fractional bits") {
    CounterRng rng(5);
    const Rational lo(3), hi(7, 2);
    for (int i = 0; i < 500; ++i) {
        const Rational x = sample_dyadic(lo, hi, rng).to_rational();
        CHECK(x > lo);
        CHECK(x < hi);
        const Rational scaled = x * Rational(BigInt(1) << kSampleFractionBits);
        CHECK(scaled.get_den() == 1);
    }
    CHECK_THROWS_AS(sample_dyadic(Rational(2), Rational(1), rng), DomainError);
}

TEST_CASE("parallel_for is index-addressed and rethrows") {
    std::vector<int> out(100, 0);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == static_cast<int>(i * i));
    }
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw DomainError("x"); }), DomainError);
}

TEST_CASE("remark test accounting and determinism") {
    const auto cfg = small_config();
    const auto a = run_remark_test(cfg, 1);
    const auto b = run_remark_test(cfg, 3);
    CHECK(a.successes + a.failures + a.precision_exhausted == cfg.trials);
    CHECK(a.trials_csv() == b.trials_csv());
    CHECK(a.to_json().dump() == b.to_json().dump());
    std::int64_t hist = 0;
    for (const auto& [tau, count] : a.tau_histogram) {
        hist += count;
        CHECK(tau <= *a.max_tau);
    }
    CHECK(hist == a.successes);
    CHECK(a.successes == cfg.trials);
    CHECK(a.trials_csv().rfind("trial,outcome,step,odd_steps\n", 0) == 0);
    CHECK(a.histogram_csv().rfind("tau,count\n", 0) == 0);
}

TEST_CASE("remark test edge configurations") {
    auto cfg = small_config();
    cfg.prefix_len = 2;
    const auto coarse = run_remark_test(cfg);
    CHECK(coarse.precision_exhausted == cfg.trials);

    cfg = small_config();
    cfg.b_exp = 20;
    cfg.prefix_len = 30;
    cfg.max_steps = 0;
    BigInt k;
    mpz_ui_pow_ui(k.get_mpz_t(), 3, 20);
    cfg.threshold = Rational(k);
    const auto instant = run_remark_test(cfg);
    CHECK(instant.successes == cfg.trials);
    CHECK(instant.max_tau == 0);
}

TEST_CASE("remark config validation") {
    auto cfg = small_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.prefix_len = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.max_steps = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.threshold = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const auto parsed = RemarkTestConfig::from_config(FlatConfig::parse(
        "seed = 4\ntrials = 5\nb_exp = 3\nprefix_len = 40\nmax_steps = 10\nthreshold_num = 5\nthreshold_den = 2\n"));
    CHECK(parsed.seed == 4);
    CHECK(parsed.threshold == Rational(5, 2));
    CHECK_THROWS_AS(RemarkTestConfig::from_config(FlatConfig::parse("trials = 5\nb_exp = 3\nprefix_len = 4\nmax_steps = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(RemarkTestConfig::from_config(
                        FlatConfig::parse("seed = 1\ntrials = 5\nb_exp = 3\nprefix_len = 4\nmax_steps = 1\nthreshold_num = 3\n")),
                    ConfigError);
    CHECK_THROWS_AS(RemarkTestConfig::from_config(
                        FlatConfig::parse("seed = 1\ntrials = 5\nb_exp = 3\nprefix_len = 4\nmax_steps = 1\nbogus = 3\n")),
                    ConfigError);
}

TEST_CASE("stopping time statistics") {
    const auto trivial = stopping_time_stats(Rational(2), Rational(9, 4), 20, Rational(9, 4), 1);
    for (const auto& t : trivial.taus) {
        CHECK(t == 0);
    }
    CHECK(trivial.mean_ratio == 0);

    const Rational lo(BigInt(1) << 40), hi(BigInt(1) << 41);
    const auto stats = stopping_time_stats(lo, hi, 200, Rational(9, 4), 77, 100000, 2);
    CHECK(stats.exhausted == 0);
    CHECK(stats.mean_ratio > 4.3);
    CHECK(stats.mean_ratio < 5.3);
    CHECK(stats.quantiles.at("q00") <= stats.quantiles.at("q50"));
    CHECK(stats.quantiles.at("q50") <= stats.quantiles.at("q100"));
    CHECK(stats.samples_csv().rfind("trial,x,tau,log2_x_approx,ratio_approx\n", 0) == 0);
    CHECK_THROWS_AS(stopping_time_stats(Rational(1), Rational(2), 5, Rational(9, 4), 1), DomainError);
}

TEST_CASE("envelope check matches a powered rational oracle") {
    CounterRng rng(9);
    const Rational lo(BigInt(1) << 20), hi(BigInt(1) << 21);
    int passes = 0;
    for (int i = 0; i < 40; ++i) {
        const auto x = sample_dyadic(lo, hi, rng);
        const auto r = envelope_check(x, Rational(1, 10));
        const auto expected = oracle_envelope_violation(x.to_rational());
        CHECK(r.first_violation == expected);
        CHECK(r.pass == !expected.has_value());
        passes += r.pass ? 1 : 0;
    }
    // also at an integer point
    const TernaryDyadic p(BigInt(1) << 20);
    CHECK(envelope_check(p, Rational(1, 10)).first_violation == oracle_envelope_violation(p.to_rational()));
    MESSAGE("envelope passes at 2^20: ", passes, "/40");
    CHECK_THROWS_AS(envelope_check(TernaryDyadic(BigInt(1)), Rational(1, 10)), DomainError);
    CHECK_THROWS_AS(envelope_check(TernaryDyadic(BigInt(5)), Rational(0)), DomainError);
}

TEST_CASE("envelope is monotone in epsilon") {
    CounterRng rng(13);
    const Rational lo(BigInt(1) << 30), hi(BigInt(1) << 31);
    for (int i = 0; i < 30; ++i) {
        const auto x = sample_dyadic(lo, hi, rng);
        bool previous = false;
        for (const Rational& eps : {Rational(1, 10), Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)}) {
            const bool pass = envelope_check(x, eps).pass;
            CHECK((!previous || pass));
            previous = pass;
        }
        CHECK(previous);
    }
}

TEST_CASE("lambda slices") {
    const TernaryDyadic x(BigInt(1000003));
    const auto slices = lambda_slice_check(x, Rational(1, 10), {Rational(1), Rational(0), Rational(1, 2)});
    REQUIRE(slices.size() == 3);
    CHECK(slices[0].index == 0);
    CHECK(slices[0].pass);
    CHECK(slices[1].index == envelope_check(x, Rational(1, 10)).k_max);
    CHECK_THROWS_AS(lambda_slice_check(x, Rational(1, 10), {Rational(3, 2)}), DomainError);

    // Within the envelope at eps/2 every slice holds at eps.
    CounterRng rng(21);
    const Rational lo(BigInt(1) << 20), hi(BigInt(1) << 21);
    int inside = 0;
    for (int i = 0; i < 200; ++i) {
        const auto y = sample_dyadic(lo, hi, rng);
        if (envelope_check(y, Rational(1, 2)).pass) {
            ++inside;
            for (const auto& s : lambda_slice_check(y, Rational(1), {Rational(0), Rational(1, 2), Rational(1)})) {
                CHECK(s.pass);
            }
        }
    }
    CHECK(inside > 0);
}

TEST_CASE("envelope survey is deterministic across job counts") {
    const Rational lo(BigInt(1) << 10), hi(BigInt(1) << 11);
    const std::vector<Rational> grid{Rational(0), Rational(1, 2), Rational(1)};
    const auto a = envelope_survey(lo, hi, 25, Rational(1, 2), grid, 3, 1);
    const auto b = envelope_survey(lo, hi, 25, Rational(1, 2), grid, 3, 3);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_csv().rfind("trial,x,k_max,envelope_pass,first_violation,lambda_pass", 0) == 0);
}

TEST_CASE("budgeted minimum") {
    const auto r = min_within_budget(TernaryDyadic(BigInt(4)), Rational(1, 10), Rational(9, 4));
    CHECK(r.budget >= 9);
    CHECK(r.reached);
    CHECK(r.reached_at == 1);
    CHECK_THROWS_AS(min_within_budget(TernaryDyadic::from_rational(Rational(1, 2)), Rational(1, 10), Rational(9, 4)),
                    DomainError);

    CounterRng rng(17);
    const Rational lo(BigInt(1) << 20), hi(BigInt(1) << 21);
    int reached = 0;
    int reached_wide = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        const auto x = sample_dyadic(lo, hi, rng);
        const auto b = min_within_budget(x, Rational(1, 10), Rational(9, 4));
        // independent orbit scan with the same budget
        Rational y = x.to_rational();
        std::optional<std::int64_t> first;
        for (std::int64_t k = 0; k <= b.budget; ++k) {
            if (y <= Rational(9, 4)) {
                first = k;
                break;
            }
            y = oracle_step(y);
        }
        CHECK(b.reached_at == first);
        reached += b.reached ? 1 : 0;
        reached_wide += min_within_budget(x, Rational(2), Rational(9, 4)).reached ? 1 : 0;
    }
    // A typical orbit needs about c log2 x steps, so a budget a little above that
    // catches a majority; a wider budget can only catch more.
    CHECK(reached > n / 2);
    CHECK(reached_wide > reached);
}

TEST_CASE("density estimates and fit") {
    const std::vector<Rational> grid{Rational(10), Rational(100), Rational(1000)};
    const auto always = real_density_estimate([](const TernaryDyadic&) { return true; }, grid, 50, 1);
    CHECK_FALSE(always.fit.has_deficit);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(always.fraction(i) == 1.0);
    }

    const auto above_one = real_density_estimate([](const TernaryDyadic& x) { return x.to_rational() > 1; },
                                                 {Rational(10)}, 2000, 5, 2);
    CHECK(above_one.fraction(0) == doctest::Approx(0.9).epsilon(0.05));
    CHECK(above_one.to_csv().rfind("R,hits,samples,fraction_approx\n", 0) == 0);

    std::vector<double> rs{100, 400, 1600, 6400};
    std::vector<double> fr;
    for (double r : rs) {
        fr.push_back(1.0 - 3.0 / std::sqrt(r));
    }
    const auto fit = fit_density(rs, fr);
    CHECK(fit.has_deficit);
    CHECK(fit.D == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.C == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(real_density_estimate([](const TernaryDyadic&) { return true; }, {Rational(2), Rational(1)}, 5, 1),
                    DomainError);
}
