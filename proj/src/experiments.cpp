#include <rcollatz/experiments.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace rcollatz {

namespace {

BigInt pow_big(const BigInt& base, std::uint64_t e) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

Rational pow_rational(const Rational& q, std::int64_t e) {
    const auto m = static_cast<std::uint64_t>(e < 0 ? -e : e);
    Rational out(pow_big(q.get_num(), m), pow_big(q.get_den(), m));
    if (e < 0) {
        out = 1 / out;
    }
    return out;
}

Rational pow3_rational(std::int64_t e) { return pow_rational(Rational(3), e); }
Rational pow2_rational(std::int64_t e) { return pow_rational(Rational(2), e); }

// Largest k >= 0 with fits(k), starting from a floating-point estimate and
// correcting exactly. fits must be monotone (true then false) and fits(0) true.
template <typename Fits>
std::int64_t largest_satisfying(double estimate, Fits&& fits) {
    auto k = static_cast<std::int64_t>(std::floor(std::max(estimate, 0.0)));
    while (k > 0 && !fits(k)) {
        --k;
    }
    while (fits(k + 1)) {
        ++k;
    }
    return k;
}

std::string fixed(double v, int places = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

double log2_rational(const Rational& q) {
    long en = 0;
    long ed = 0;
    const double mn = mpz_get_d_2exp(&en, q.get_num().get_mpz_t());
    const double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
    return std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
}

} // namespace

double stopping_constant() { return 1.0 / (1.0 - std::log2(3.0) / 2.0); }

TernaryDyadic sample_dyadic(const Rational& lo, const Rational& hi, CounterRng& rng) {
    if (sgn(lo) < 0 || lo >= hi) {
        throw DomainError("sampling needs 0 <= lo < hi");
    }
    BigInt scale = 1;
    mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), kSampleFractionBits);
    const Rational lo_scaled = lo * scale;
    const Rational hi_scaled = hi * scale;
    BigInt first;
    BigInt last;
    mpz_fdiv_q(first.get_mpz_t(), lo_scaled.get_num().get_mpz_t(), lo_scaled.get_den().get_mpz_t());
    first += 1;
    mpz_cdiv_q(last.get_mpz_t(), hi_scaled.get_num().get_mpz_t(), hi_scaled.get_den().get_mpz_t());
    last -= 1;
    if (last < first) {
        throw DomainError("sampling interval contains no dyadic point of the required precision");
    }
    const BigInt u = first + rng.uniform_below(BigInt(last - first + 1));
    return TernaryDyadic(u, 0, kSampleFractionBits);
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<std::size_t>(jobs, count);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// --- stream trials ---------------------------------------------------------

void RemarkTestConfig::validate() const {
    if (trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (prefix_len < 1) {
        throw ConfigError("prefix_len must be >= 1");
    }
    if (max_steps < 0) {
        throw ConfigError("max_steps must be >= 0");
    }
    if (sgn(threshold) <= 0) {
        throw ConfigError("threshold must be positive");
    }
    if (b_exp < -1000000 || b_exp > 1000000) {
        throw ConfigError("b_exp out of range");
    }
    if (prefix_len > 10000000 || max_steps > 100000000 || trials > 1000000000) {
        throw ConfigError("trials, prefix_len or max_steps beyond supported size");
    }
}

RemarkTestConfig RemarkTestConfig::from_config(const FlatConfig& cfg) {
    cfg.reject_unknown({"seed", "trials", "b_exp", "prefix_len", "max_steps", "threshold_num", "threshold_den"});
    RemarkTestConfig out;
    out.seed = cfg.unsigned_integer("seed");
    out.trials = cfg.integer("trials");
    out.b_exp = cfg.integer("b_exp");
    out.prefix_len = cfg.integer("prefix_len");
    out.max_steps = cfg.integer("max_steps");
    if (cfg.has("threshold_num") != cfg.has("threshold_den")) {
        throw ConfigError("threshold_num and threshold_den must be given together");
    }
    if (cfg.has("threshold_num")) {
        const Rational num = cfg.rational("threshold_num");
        const Rational den = cfg.rational("threshold_den");
        if (sgn(den) == 0) {
            throw ConfigError("threshold_den must be non-zero");
        }
        out.threshold = num / den;
    }
    out.validate();
    return out;
}

nlohmann::ordered_json RemarkTestConfig::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["b_exp"] = b_exp;
    j["prefix_len"] = prefix_len;
    j["max_steps"] = max_steps;
    j["threshold"] = threshold.get_str();
    return j;
}

RemarkReport run_remark_test(const RemarkTestConfig& cfg, unsigned jobs) {
    cfg.validate();
    RemarkReport report;
    report.trials.resize(static_cast<std::size_t>(cfg.trials));
    parallel_for(report.trials.size(), jobs, [&](std::size_t i) {
        const auto stream = sample_digit_stream(derive_seed(cfg.seed, i), cfg.b_exp, static_cast<std::size_t>(cfg.prefix_len));
        const auto r = iterate_stream(stream, cfg.max_steps, cfg.threshold);
        report.trials[i] = TrialOutcome{r.outcome, r.step, r.parities.weight()};
    });
    for (const auto& t : report.trials) {
        switch (t.outcome) {
        case StreamReport::Outcome::Reached:
            ++report.successes;
            ++report.tau_histogram[t.step];
            report.max_tau = std::max(report.max_tau.value_or(t.step), t.step);
            break;
        case StreamReport::Outcome::NotReached:
            ++report.failures;
            break;
        case StreamReport::Outcome::PrecisionExhausted:
            ++report.precision_exhausted;
            break;
        }
    }
    return report;
}

nlohmann::ordered_json RemarkReport::to_json() const {
    nlohmann::ordered_json j;
    j["successes"] = successes;
    j["failures"] = failures;
    j["precision_exhausted"] = precision_exhausted;
    j["max_tau"] = max_tau ? nlohmann::ordered_json(*max_tau) : nlohmann::ordered_json(nullptr);
    auto hist = nlohmann::ordered_json::array();
    for (const auto& [tau, count] : tau_histogram) {
        hist.push_back({{"tau", tau}, {"count", count}});
    }
    j["tau_histogram"] = std::move(hist);
    return j;
}

std::string RemarkReport::trials_csv() const {
    std::ostringstream os;
    os << "trial,outcome,step,odd_steps\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        os << i << ',' << to_string(trials[i].outcome) << ',' << trials[i].step << ',' << trials[i].odd_steps << '\n';
    }
    return os.str();
}

std::string RemarkReport::histogram_csv() const {
    std::ostringstream os;
    os << "tau,count\n";
    for (const auto& [tau, count] : tau_histogram) {
        os << tau << ',' << count << '\n';
    }
    return os.str();
}

// --- stopping-time scaling -------------------------------------------------

StoppingStats stopping_time_stats(const Rational& lo, const Rational& hi, std::int64_t samples, const Rational& threshold,
                                  std::uint64_t seed, std::int64_t max_steps, unsigned jobs) {
    if (lo <= 1 || lo >= hi) {
        throw DomainError("stopping-time sampling needs 1 < lo < hi");
    }
    if (samples < 1) {
        throw DomainError("samples must be >= 1");
    }
    StoppingStats stats;
    stats.samples = samples;
    const auto n = static_cast<std::size_t>(samples);
    stats.xs.resize(n);
    stats.taus.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        CounterRng rng(derive_seed(seed, i));
        stats.xs[i] = sample_dyadic(lo, hi, rng);
        stats.taus[i] = stopping_time(stats.xs[i], threshold, max_steps).tau;
    });
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n; ++i) {
        if (!stats.taus[i]) {
            ++stats.exhausted;
            continue;
        }
        ratios.push_back(static_cast<double>(*stats.taus[i]) / stats.xs[i].log2());
    }
    if (!ratios.empty()) {
        const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
        stats.mean_ratio = sum / static_cast<double>(ratios.size());
        if (ratios.size() > 1) {
            double ss = 0;
            for (double r : ratios) {
                ss += (r - stats.mean_ratio) * (r - stats.mean_ratio);
            }
            stats.stdev = std::sqrt(ss / static_cast<double>(ratios.size() - 1));
        }
        std::sort(ratios.begin(), ratios.end());
        for (int q : {0, 25, 50, 75, 100}) {
            const double pos = q / 100.0 * static_cast<double>(ratios.size() - 1);
            const auto below = static_cast<std::size_t>(std::floor(pos));
            const auto above = std::min(below + 1, ratios.size() - 1);
            const double t = pos - static_cast<double>(below);
            char key[8];
            std::snprintf(key, sizeof key, "q%02d", q);
            stats.quantiles[key] = ratios[below] + t * (ratios[above] - ratios[below]);
        }
    }
    return stats;
}

nlohmann::ordered_json StoppingStats::to_json() const {
    nlohmann::ordered_json j;
    j["samples"] = samples;
    j["exhausted"] = exhausted;
    j["included"] = samples - exhausted;
    j["mean_ratio"] = mean_ratio;
    j["stdev"] = stdev;
    j["quantiles"] = quantiles;
    j["constant_c"] = stopping_constant();
    if (exhausted > 0) {
        j["warning"] = std::to_string(exhausted) + " exhausted samples excluded from ratio statistics";
    }
    return j;
}

std::string StoppingStats::samples_csv() const {
    std::ostringstream os;
    os << "trial,x,tau,log2_x_approx,ratio_approx\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double l = xs[i].log2();
        os << i << ',' << xs[i].to_string() << ',';
        if (taus[i]) {
            os << *taus[i] << ',' << fixed(l) << ',' << fixed(static_cast<double>(*taus[i]) / l);
        } else {
            os << "exhausted," << fixed(l) << ',';
        }
        os << '\n';
    }
    return os.str();
}

// --- envelopes ---------------------------------------------------------------

EnvelopeReport envelope_check(const TernaryDyadic& x, const Rational& epsilon) {
    const Rational xv = x.to_rational();
    if (xv <= 1) {
        throw DomainError("envelope check needs x > 1");
    }
    if (sgn(epsilon) <= 0) {
        throw DomainError("envelope check needs epsilon > 0");
    }
    EnvelopeReport report;
    report.x = x;
    report.epsilon = epsilon;
    const double lx = x.log2();
    const double log2_3 = std::log2(3.0);

    // k <= c log2 x  <=>  4^k <= 3^k x^2
    const Rational x2 = xv * xv;
    report.k_max = largest_satisfying(stopping_constant() * lx,
                                      [&](std::int64_t k) { return pow2_rational(2 * k) <= pow3_rational(k) * x2; });

    // Both envelope sides together say 3^|2w - k| <= x^(2 eps); with eps = p/q
    // this is 3^(q |2w - k|) <= x^(2p).
    const std::int64_t p = epsilon.get_num().get_si();
    const std::int64_t q = epsilon.get_den().get_si();
    const Rational bound = pow_rational(xv, 2 * p);
    const std::int64_t d_max = largest_satisfying(2.0 * static_cast<double>(p) * lx / (static_cast<double>(q) * log2_3),
                                                  [&](std::int64_t d) { return pow3_rational(q * d) <= bound; });

    OrbitCursor cursor(x);
    report.ratio_log.reserve(static_cast<std::size_t>(report.k_max + 1));
    for (std::int64_t k = 0; k <= report.k_max; ++k) {
        const std::int64_t w = cursor.odd_steps();
        report.ratio_log.push_back((static_cast<double>(w) - static_cast<double>(k) / 2.0) * log2_3);
        if (!report.first_violation && std::abs(2 * w - k) > d_max) {
            report.first_violation = k;
        }
        if (k < report.k_max) {
            cursor.step();
        }
    }
    report.pass = !report.first_violation;
    return report;
}

std::vector<LambdaSlice> lambda_slice_check(const TernaryDyadic& x, const Rational& epsilon,
                                            const std::vector<Rational>& lambdas) {
    const Rational xv = x.to_rational();
    if (xv <= 1) {
        throw DomainError("lambda slice check needs x > 1");
    }
    const double lx = x.log2();
    std::vector<LambdaSlice> out;
    for (const Rational& lambda : lambdas) {
        if (sgn(lambda) < 0 || lambda > 1) {
            throw DomainError("lambda must lie in [0, 1]");
        }
        // i <= (1 - a/b) c log2 x  <=>  4^(ib) <= 3^(ib) x^(2(b - a))
        const std::int64_t a = lambda.get_num().get_si();
        const std::int64_t b = lambda.get_den().get_si();
        const Rational rhs = pow_rational(xv, 2 * (b - a));
        LambdaSlice slice;
        slice.lambda = lambda;
        slice.index = largest_satisfying((1.0 - lambda.get_d()) * stopping_constant() * lx, [&](std::int64_t i) {
            return pow2_rational(2 * i * b) <= pow3_rational(i * b) * rhs;
        });
        out.push_back(slice);
    }
    std::int64_t last = 0;
    for (const auto& s : out) {
        last = std::max(last, s.index);
    }
    std::vector<std::int64_t> weight_at{0};
    OrbitCursor cursor(x);
    while (cursor.steps() < last) {
        cursor.step();
        weight_at.push_back(cursor.odd_steps());
    }
    for (auto& s : out) {
        // x^(lambda - eps - 1) <= 3^w / 2^i <= x^(lambda + eps - 1), raised to the common denominator
        const Rational growth = pow3_rational(weight_at[static_cast<std::size_t>(s.index)]) / pow2_rational(s.index);
        const Rational lo_exp = s.lambda - epsilon - 1;
        const Rational hi_exp = s.lambda + epsilon - 1;
        BigInt den;
        mpz_lcm(den.get_mpz_t(), s.lambda.get_den().get_mpz_t(), epsilon.get_den().get_mpz_t());
        const std::int64_t d = den.get_si();
        const Rational lo_scaled = lo_exp * d;
        const Rational hi_scaled = hi_exp * d;
        const Rational lhs = pow_rational(growth, d);
        s.pass = pow_rational(xv, lo_scaled.get_num().get_si()) <= lhs && lhs <= pow_rational(xv, hi_scaled.get_num().get_si());
    }
    return out;
}

bool EnvelopeSample::all_slices_pass() const {
    return std::all_of(slices.begin(), slices.end(), [](const LambdaSlice& s) { return s.pass; });
}

EnvelopeSurvey envelope_survey(const Rational& lo, const Rational& hi, std::int64_t samples, const Rational& epsilon,
                               const std::vector<Rational>& lambdas, std::uint64_t seed, unsigned jobs) {
    if (samples < 1) {
        throw DomainError("samples must be >= 1");
    }
    EnvelopeSurvey survey;
    survey.samples.resize(static_cast<std::size_t>(samples));
    parallel_for(survey.samples.size(), jobs, [&](std::size_t i) {
        CounterRng rng(derive_seed(seed, i));
        auto& s = survey.samples[i];
        s.x = sample_dyadic(lo, hi, rng);
        s.envelope = envelope_check(s.x, epsilon);
        s.slices = lambda_slice_check(s.x, epsilon, lambdas);
    });
    for (const auto& s : survey.samples) {
        survey.envelope_pass += s.envelope.pass ? 1 : 0;
        survey.lambda_grid_pass += s.all_slices_pass() ? 1 : 0;
    }
    return survey;
}

nlohmann::ordered_json EnvelopeSurvey::to_json() const {
    nlohmann::ordered_json j;
    j["samples"] = samples.size();
    j["envelope_pass"] = envelope_pass;
    j["lambda_grid_pass"] = lambda_grid_pass;
    j["tolerance_note"] = kHeuristicTolerance;
    return j;
}

std::string EnvelopeSurvey::to_csv() const {
    std::ostringstream os;
    os << "trial,x,k_max,envelope_pass,first_violation,lambda_pass\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        std::string flags;
        for (const auto& slice : s.slices) {
            flags += slice.pass ? '1' : '0';
        }
        os << i << ',' << s.x.to_string() << ',' << s.envelope.k_max << ',' << (s.envelope.pass ? 1 : 0) << ','
           << (s.envelope.first_violation ? std::to_string(*s.envelope.first_violation) : "") << ',' << flags << '\n';
    }
    return os.str();
}

BudgetResult min_within_budget(const TernaryDyadic& x, const Rational& epsilon, const Rational& threshold) {
    if (x <= Rational(3, 4)) {
        throw DomainError("budgeted minimum needs x > 3/4");
    }
    BudgetResult result;
    result.budget = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor(x.log2() * (stopping_constant() + epsilon.get_d()))));
    OrbitCursor cursor(x);
    for (std::int64_t n = 0; n <= result.budget; ++n) {
        if (cursor.compare(threshold) <= 0) {
            result.reached = true;
            result.reached_at = n;
            break;
        }
        if (n < result.budget) {
            cursor.step();
        }
    }
    return result;
}

// --- density -----------------------------------------------------------------

DensityFit fit_density(const std::vector<double>& r_values, const std::vector<double>& fractions) {
    DensityFit fit;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        const double deficit = 1.0 - fractions[i];
        if (deficit > 0) {
            lx.push_back(std::log(r_values[i]));
            ly.push_back(std::log(deficit));
        }
    }
    if (lx.empty()) {
        return fit;
    }
    fit.has_deficit = true;
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
        double sxy = 0;
        double sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        if (sxx > 0) {
            fit.D = std::clamp(-sxy / sxx, 1e-6, 1.0);
        }
    }
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        fit.C = std::max(fit.C, (1.0 - fractions[i]) * std::pow(r_values[i], fit.D));
    }
    return fit;
}

DensityEstimate real_density_estimate(const XPredicate& indicator, const std::vector<Rational>& r_grid,
                                      std::int64_t samples_per_r, std::uint64_t seed, unsigned jobs) {
    if (samples_per_r < 1) {
        throw DomainError("samples per R must be >= 1");
    }
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (sgn(r_grid[i]) <= 0 || (i > 0 && r_grid[i] <= r_grid[i - 1])) {
            throw DomainError("R grid must be positive and strictly increasing");
        }
    }
    DensityEstimate est;
    est.r_grid = r_grid;
    est.samples_per_r = samples_per_r;
    const auto per = static_cast<std::size_t>(samples_per_r);
    std::vector<char> hit(r_grid.size() * per, 0);
    parallel_for(hit.size(), jobs, [&](std::size_t flat) {
        const std::size_t i = flat / per;
        const std::size_t t = flat % per;
        CounterRng rng(derive_seed(derive_seed(seed, i), t));
        hit[flat] = indicator(sample_dyadic(Rational(0), r_grid[i], rng)) ? 1 : 0;
    });
    std::vector<double> rs;
    std::vector<double> fr;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        est.hits.push_back(std::count(hit.begin() + static_cast<std::ptrdiff_t>(i * per),
                                      hit.begin() + static_cast<std::ptrdiff_t>((i + 1) * per), 1));
        rs.push_back(std::exp2(log2_rational(r_grid[i])));
        fr.push_back(est.fraction(i));
    }
    est.fit = fit_density(rs, fr);
    return est;
}

nlohmann::ordered_json DensityEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["samples_per_r"] = samples_per_r;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        rows.push_back({{"R", r_grid[i].get_str()}, {"hits", hits[i]}, {"fraction", fraction(i)}});
    }
    j["grid"] = std::move(rows);
    nlohmann::ordered_json f;
    f["has_deficit"] = fit.has_deficit;
    f["C"] = fit.C;
    f["D"] = fit.D;
    j["fit"] = std::move(f);
    return j;
}

std::string DensityEstimate::to_csv() const {
    std::ostringstream os;
    os << "R,hits,samples,fraction_approx\n";
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        os << r_grid[i].get_str() << ',' << hits[i] << ',' << samples_per_r << ',' << fixed(fraction(i)) << '\n';
    }
    return os.str();
}

} // namespace rcollatz
