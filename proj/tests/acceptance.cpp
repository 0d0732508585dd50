// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <rcollatz/balanced_word.hpp>
#include <rcollatz/experiments.hpp>
#include <rcollatz/gf2_poly.hpp>
#include <rcollatz/interval.hpp>
#include <rcollatz/orbit_graph.hpp>
#include <rcollatz/rng.hpp>
#include <rcollatz/ternary_dyadic.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace rcollatz;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > limit_seconds) {
        o.pass = false;
        o.detail += " (over time limit " + std::to_string(static_cast<int>(limit_seconds)) + " s)";
    }
    std::printf("[%s] %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) {
        ++failures;
    }
}

// Plain rational oracle for one map step: floor-based nearest integer.
Rational oracle_step(const Rational& q) {
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    const Rational frac = q - Rational(fl);
    const BigInt nearest = frac > Rational(1, 2) ? BigInt(fl + 1) : fl;
    return mpz_odd_p(nearest.get_mpz_t()) ? Rational(q * 3 / 2) : Rational(q / 2);
}

BigInt pow_ui(unsigned long base, unsigned long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), base, e);
    return p;
}

TernaryDyadic random_dyadic(CounterRng& rng, int range = 10) {
    BigInt n = BigInt(static_cast<unsigned long>(rng.next() >> 1)) + 1;
    const auto j = static_cast<std::int64_t>(rng.uniform_below(2 * range + 1)) - range;
    const auto k = static_cast<std::int64_t>(rng.uniform_below(2 * range + 1)) - range;
    return TernaryDyadic(n, j, k);
}

std::string ratio(std::int64_t a, std::int64_t b) { return std::to_string(a) + "/" + std::to_string(b); }

const std::vector<Rational> kLambdaGrid = {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};

RemarkTestConfig scaled_remark_config() {
    RemarkTestConfig cfg;
    cfg.seed = 20120612;
    cfg.trials = 300;
    cfg.b_exp = 20;
    cfg.prefix_len = 700;
    cfg.max_steps = 600;
    cfg.threshold = Rational(9, 4);
    return cfg;
}

constexpr std::uint64_t kStoppingSeed = 1707;
constexpr std::uint64_t kEnvelopeSeed = 1606;

} // namespace

int main() {
    criterion(1, "word map equals integer map for n <= 10^6", 60, [] {
        for (unsigned long n = 1; n <= 1000000; ++n) {
            const BigInt m(n);
            const BigInt expected = n % 2 == 0 ? BigInt(n / 2) : BigInt((3 * n + 1) / 2);
            if (bt_to_int(collatz_word_step(int_to_bt(m))) != expected) {
                return Outcome{false, "mismatch at n = " + std::to_string(n)};
            }
        }
        const auto worked = collatz_word_step(BalancedWord::parse("+0-0+00+-"));
        if (worked.to_string() != "++0+---0-" || bt_to_int(worked) != 8873) {
            return Outcome{false, "5915 maps to " + worked.to_string()};
        }
        std::string trace;
        BalancedWord w = int_to_bt(BigInt(3));
        for (int i = 0; i < 6; ++i) {
            trace += (i ? " " : "") + w.to_string();
            w = collatz_word_step(w);
        }
        if (trace != "+0 +-- +0- ++ +- +") {
            return Outcome{false, "trace " + trace};
        }
        return Outcome{true, "10^6 integers, 5915 -> 8873, trace " + trace};
    });

    criterion(2, "product formula Col^N(x) 2^N = 3^w x, 10^3 samples, N = 10^3", 60, [] {
        CounterRng rng(derive_seed(2, 0));
        for (int i = 0; i < 1000; ++i) {
            const TernaryDyadic x = random_dyadic(rng);
            const auto pv = parity_vector(x, 1000);
            Rational y = x.to_rational();
            for (int s = 0; s < 1000; ++s) {
                y = oracle_step(y);
            }
            const Rational lhs = y * Rational(pow_ui(2, 1000));
            const Rational rhs = Rational(pow_ui(3, pv.weight())) * x.to_rational();
            if (lhs != rhs) {
                return Outcome{false, "identity fails for x = " + x.to_string()};
            }
        }
        return Outcome{true, "1000/1000 exact"};
    });

    criterion(3, "parity stability under x -> x + 2^N z, 10^3 triples", 10, [] {
        CounterRng rng(derive_seed(3, 0));
        for (int i = 0; i < 1000; ++i) {
            // x = n 3^j with value > 1/2
            TernaryDyadic x;
            do {
                x = TernaryDyadic(BigInt(static_cast<unsigned long>(rng.next() >> 24)) + 1,
                                  static_cast<std::int64_t>(rng.uniform_below(21)) - 10, 0);
            } while (x <= Rational(1, 2));
            const auto N = static_cast<std::int64_t>(rng.uniform_below(64)) + 1;
            BigInt z = BigInt(static_cast<unsigned long>(rng.uniform_below(1u << 20))) + 1;
            if (rng.uniform_below(2) == 1 && x.to_rational() - Rational(pow_ui(2, N) * z) > 0) {
                z = -z;
            }
            const Rational shift = Rational(pow_ui(2, static_cast<unsigned long>(N)) * z);
            const TernaryDyadic y = TernaryDyadic::from_rational(x.to_rational() + shift);
            const auto px = parity_vector(x, N);
            if (px != parity_vector(y, N)) {
                return Outcome{false, "parities differ for x = " + x.to_string()};
            }
            const auto ox = orbit(x, N);
            const auto oy = orbit(y, N);
            std::size_t w = 0;
            for (std::int64_t n = 0; n <= N; ++n) {
                const Rational expected = ox[static_cast<std::size_t>(n)].to_rational() +
                                          Rational(pow_ui(3, w) * pow_ui(2, static_cast<unsigned long>(N - n)) * z);
                if (oy[static_cast<std::size_t>(n)].to_rational() != expected) {
                    return Outcome{false, "orbit shift fails for x = " + x.to_string()};
                }
                if (n < N) {
                    w += px.bits[static_cast<std::size_t>(n)];
                }
            }
        }
        return Outcome{true, "1000/1000 triples"};
    });

    std::vector<PatternCellTable> tables_at_zero;
    criterion(4, "pattern cells all have measure 1, r in {0, 1, 7/4, 2^10}, N <= 12", 300, [&] {
        std::int64_t cells = 0;
        for (const Rational& r : {Rational(0), Rational(1), Rational(7, 4), Rational(1024)}) {
            for (int N = 0; N <= 12; ++N) {
                auto t = pattern_cells(r, N);
                for (std::size_t i = 0; i < t.measures.size(); ++i) {
                    if (t.measures[i] != 1) {
                        return Outcome{false, "r = " + r.get_str() + ", N = " + std::to_string(N) + ", pattern " +
                                                  PatternCellTable::pattern_string(i, N) + " has measure " +
                                                  t.measures[i].get_str()};
                    }
                }
                cells += static_cast<std::int64_t>(t.measures.size());
                if (sgn(r) == 0) {
                    tables_at_zero.push_back(std::move(t));
                }
            }
        }
        return Outcome{true, std::to_string(cells) + " cells exactly 1"};
    });

    criterion(5, "Hoeffding tail bound from exact cells, N <= 12, eps in {0.1, 0.2}", 300, [&] {
        if (tables_at_zero.size() != 13) {
            for (int N = static_cast<int>(tables_at_zero.size()); N <= 12; ++N) {
                tables_at_zero.push_back(pattern_cells(Rational(0), N));
            }
        }
        double worst = 0;
        for (int N = 1; N <= 12; ++N) {
            for (const Rational& eps : {Rational(1, 10), Rational(1, 5)}) {
                const Rational tail = tables_at_zero[static_cast<std::size_t>(N)].fraction_weight_at_least(
                    (Rational(1, 2) + eps) * N);
                const double bound = 2 * std::exp(-2 * eps.get_d() * eps.get_d() * N);
                worst = std::max(worst, tail.get_d() / bound);
                if (tail.get_d() > bound) {
                    return Outcome{false, "N = " + std::to_string(N) + ", eps = " + eps.get_str()};
                }
            }
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "largest tail/bound ratio %.4f", worst);
        return Outcome{true, buf};
    });

    criterion(6, "T-orbit of 1 equidistributes with density 1/(x log 3)", 30, [] {
        constexpr int kSteps = 100000;
        OrbitCursor cursor{TernaryDyadic(BigInt(1))};
        std::vector<double> xs;
        xs.reserve(kSteps);
        std::set<std::tuple<std::string, std::int64_t, std::int64_t>> seen;
        for (int i = 0; i < kSteps; ++i) {
            xs.push_back(std::exp2(cursor.log2()));
            if (i < 10000) {
                const auto v = cursor.value();
                if (!seen.emplace(v.significand().get_str(), v.three_exp(), v.two_exp()).second) {
                    return Outcome{false, "repeat at step " + std::to_string(i)};
                }
            }
            cursor.step();
        }
        std::sort(xs.begin(), xs.end());
        double ks = 0;
        const double n = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] <= 0.75 || xs[i] > 2.25) {
                return Outcome{false, "iterate left (3/4, 9/4]"};
            }
            const double F = std::log(xs[i] / 0.75) / std::log(3.0);
            ks = std::max({ks, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "KS distance %.5f, no repeats in 10^4", ks);
        return Outcome{ks < 0.02, buf};
    });

    RemarkReport remark_first;
    criterion(7, "digit-prefix trials at b = 3^20, prefix 700, M = 600", 600, [&] {
        RemarkTestConfig full;
        full.seed = 1;
        full.trials = 3000;
        full.b_exp = 200;
        full.prefix_len = 6500;
        full.max_steps = 6000;
        full.validate();
        remark_first = run_remark_test(scaled_remark_config());
        const auto& r = remark_first;
        const bool ok = r.precision_exhausted == 0 && r.successes >= 295 &&
                        r.successes + r.failures + r.precision_exhausted == 300;
        return Outcome{ok, "successes " + ratio(r.successes, 300) + ", precision exhausted " +
                               std::to_string(r.precision_exhausted) + ", max tau " +
                               (r.max_tau ? std::to_string(*r.max_tau) : "none") + "; full-scale config accepted"};
    });

    StoppingStats stopping_first;
    criterion(8, "mean tau/log2 x in [4.3, 5.3] for 10^3 samples in (2^40, 2^41)", 300, [&] {
        stopping_first = stopping_time_stats(Rational(pow_ui(2, 40)), Rational(pow_ui(2, 41)), 1000, Rational(9, 4),
                                             kStoppingSeed);
        const auto& s = stopping_first;
        char buf[128];
        std::snprintf(buf, sizeof buf, "mean %.4f (c = %.4f), stdev %.4f, exhausted %lld", s.mean_ratio,
                      stopping_constant(), s.stdev, static_cast<long long>(s.exhausted));
        return Outcome{s.exhausted == 0 && s.mean_ratio >= 4.3 && s.mean_ratio <= 5.3, buf};
    });

    EnvelopeSurvey envelope_first;
    criterion(9, "envelope and lambda-grid pass fractions >= 0.9, 200 samples in (2^30, 2^31)", 300, [&] {
        envelope_first = envelope_survey(Rational(pow_ui(2, 30)), Rational(pow_ui(2, 31)), 200, Rational(1, 10),
                                         kLambdaGrid, kEnvelopeSeed);
        const auto& s = envelope_first;
        const bool ok = s.envelope_pass >= 180 && s.lambda_grid_pass >= 180;
        return Outcome{ok, "envelope " + ratio(s.envelope_pass, 200) + ", lambda grid " +
                               ratio(s.lambda_grid_pass, 200) + " (" + kHeuristicTolerance + ")"};
    });

    criterion(10, "graph invariants on 10^3 random windows, corruption detected", 60, [] {
        CounterRng rng(derive_seed(10, 0));
        std::int64_t detected = 0;
        for (int i = 0; i < 1000; ++i) {
            const TernaryDyadic x = random_dyadic(rng, 6);
            const auto rows = static_cast<std::int64_t>(rng.uniform_below(11)) + 2;
            const auto cols = static_cast<std::int64_t>(rng.uniform_below(10)) + 3;
            const auto n0 = static_cast<std::int64_t>(rng.uniform_below(11)) - 5;
            const auto z_hi = static_cast<std::int64_t>(rng.uniform_below(16)) - 4;
            auto w = build_window(x, {n0, n0 + rows - 1}, {z_hi, z_hi - cols + 1});
            if (!check_nonzero_propagation(w).empty() || !check_recurrence(w).empty() || !check_edge_rule(w).empty()) {
                return Outcome{false, "violation for x = " + x.to_string()};
            }
            // A cell that enters some recurrence instance linearly.
            GridNode c;
            do {
                c.n = w.n0 + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(rows)));
                c.z = w.z_lo + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(cols)));
            } while (!((c.n > w.n0 && c.z >= w.z_lo + 2) || (c.n < w.n1 && c.z >= w.z_lo + 1 && c.z <= w.z_hi - 1)));
            auto bad = w;
            const int old = static_cast<int>(bad.label(c));
            bad.set_label(c, static_cast<Label>((old + 2) % 3 - 1));
            if (check_recurrence(bad).empty()) {
                return Outcome{false, "corruption at (" + std::to_string(c.n) + ", " + std::to_string(c.z) +
                                          ") missed for x = " + x.to_string()};
            }
            ++detected;
            const auto edges = w.g_edges();
            if (!edges.empty()) {
                auto zeroed = w;
                zeroed.set_label(edges[rng.uniform_below(edges.size())].to, Label::Zero);
                if (check_nonzero_propagation(zeroed).empty()) {
                    return Outcome{false, "zeroed target missed for x = " + x.to_string()};
                }
                ++detected;
            }
        }
        return Outcome{true, "0 violations on 1000 windows, " + std::to_string(detected) + " corruptions detected"};
    });

    criterion(11, "GF(2) conjugacy and acceleration, exhaustive to degree 16", 10, [] {
        const auto conj = conjugacy_check(16);
        const auto acc = acceleration_check(16);
        return Outcome{conj.pass && acc.pass, std::to_string(conj.checked) + " + " + std::to_string(acc.checked) +
                                                  " polynomials"};
    });

    criterion(12, "reruns of 7-9 give byte-identical data files", 900, [&] {
        const auto remark = run_remark_test(scaled_remark_config(), 2);
        const auto stopping = stopping_time_stats(Rational(pow_ui(2, 40)), Rational(pow_ui(2, 41)), 1000,
                                                  Rational(9, 4), kStoppingSeed, 100000, 2);
        const auto envelope = envelope_survey(Rational(pow_ui(2, 30)), Rational(pow_ui(2, 31)), 200, Rational(1, 10),
                                              kLambdaGrid, kEnvelopeSeed, 2);
        const bool same = remark.trials_csv() == remark_first.trials_csv() &&
                          remark.histogram_csv() == remark_first.histogram_csv() &&
                          remark.to_json().dump() == remark_first.to_json().dump() &&
                          stopping.samples_csv() == stopping_first.samples_csv() &&
                          stopping.to_json().dump() == stopping_first.to_json().dump() &&
                          envelope.to_csv() == envelope_first.to_csv() && !remark_first.trials.empty();
        return Outcome{same, same ? "identical with 2 workers" : "outputs differ"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
