#pragma once

// Seeded Monte Carlo and exact checks: stream stopping-time trials, stopping-time
// scaling, trajectory envelopes, budgeted minima and real-density estimates.

#include <rcollatz/interval.hpp>
#include <rcollatz/literal.hpp>
#include <rcollatz/rng.hpp>
#include <rcollatz/ternary_dyadic.hpp>

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rcollatz {

/// 1 / (1 - log2(3) / 2), evaluated from log2(3) at run time.
double stopping_constant();

/// Label attached to every pass-fraction threshold that is an engineering choice.
inline constexpr const char* kHeuristicTolerance = "heuristic tolerance";

/// Uniform dyadic sample with 128 fractional bits strictly inside (lo, hi).
TernaryDyadic sample_dyadic(const Rational& lo, const Rational& hi, CounterRng& rng);
inline constexpr unsigned kSampleFractionBits = 128;

/// Runs fn(i) for i in [0, count) on `jobs` threads. Results must be written by
/// index; the first exception by index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

struct RemarkTestConfig {
    std::uint64_t seed = 0;
    std::int64_t trials = 1;
    std::int64_t b_exp = 1;
    std::int64_t prefix_len = 1;
    std::int64_t max_steps = 0;
    Rational threshold{9, 4};

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
    /// Keys: seed, trials, b_exp, prefix_len, max_steps, threshold_num, threshold_den.
    static RemarkTestConfig from_config(const FlatConfig& cfg);
    nlohmann::ordered_json to_json() const;
};

struct TrialOutcome {
    StreamReport::Outcome outcome = StreamReport::Outcome::NotReached;
    std::int64_t step = 0;
    std::size_t odd_steps = 0;
};

struct RemarkReport {
    std::int64_t successes = 0;
    std::int64_t failures = 0;
    std::int64_t precision_exhausted = 0;
    std::optional<std::int64_t> max_tau;
    std::map<std::int64_t, std::int64_t> tau_histogram;
    std::vector<TrialOutcome> trials;

    nlohmann::ordered_json to_json() const;
    /// trial,outcome,step,odd_steps
    std::string trials_csv() const;
    /// tau,count
    std::string histogram_csv() const;
};

RemarkReport run_remark_test(const RemarkTestConfig& cfg, unsigned jobs = 1);

struct StoppingStats {
    std::int64_t samples = 0;
    std::int64_t exhausted = 0; // excluded from the ratio statistics
    double mean_ratio = 0;
    double stdev = 0;
    std::map<std::string, double> quantiles; // "q00", "q25", "q50", "q75", "q100"
    std::vector<TernaryDyadic> xs;
    std::vector<std::optional<std::int64_t>> taus;

    nlohmann::ordered_json to_json() const;
    /// trial,x,tau,log2_x_approx,ratio_approx
    std::string samples_csv() const;
};

/// Stopping-time ratios tau_K(x) / log2(x) for x uniform in (lo, hi).
StoppingStats stopping_time_stats(const Rational& lo, const Rational& hi, std::int64_t samples, const Rational& threshold,
                                  std::uint64_t seed, std::int64_t max_steps = 100000, unsigned jobs = 1);

struct EnvelopeReport {
    TernaryDyadic x;
    Rational epsilon;
    std::int64_t k_max = 0;
    bool pass = true;
    std::optional<std::int64_t> first_violation;
    /// log2(Col^k(x) / ((sqrt(3)/2)^k x)) for k = 0..k_max, convenience output.
    std::vector<double> ratio_log;
};

/// Exact check of (sqrt3/2)^k x^(1-eps) <= Col^k(x) <= (sqrt3/2)^k x^(1+eps) for k <= k_max.
EnvelopeReport envelope_check(const TernaryDyadic& x, const Rational& epsilon);

struct LambdaSlice {
    Rational lambda;
    std::int64_t index = 0;
    bool pass = false;
};

/// Exact check of x^(lambda-eps) <= Col^i(x) <= x^(lambda+eps) at i = floor((1-lambda) c log2 x).
std::vector<LambdaSlice> lambda_slice_check(const TernaryDyadic& x, const Rational& epsilon,
                                            const std::vector<Rational>& lambdas);

struct EnvelopeSample {
    TernaryDyadic x;
    EnvelopeReport envelope;
    std::vector<LambdaSlice> slices;
    bool all_slices_pass() const;
};

struct EnvelopeSurvey {
    std::vector<EnvelopeSample> samples;
    std::int64_t envelope_pass = 0;
    std::int64_t lambda_grid_pass = 0;

    nlohmann::ordered_json to_json() const;
    /// trial,x,k_max,envelope_pass,first_violation,lambda_pass (one 0/1 flag per lambda)
    std::string to_csv() const;
};

/// Envelope and lambda-slice checks on x uniform in (lo, hi).
EnvelopeSurvey envelope_survey(const Rational& lo, const Rational& hi, std::int64_t samples, const Rational& epsilon,
                               const std::vector<Rational>& lambdas, std::uint64_t seed, unsigned jobs = 1);

struct BudgetResult {
    bool reached = false;
    std::int64_t budget = 0;
    std::optional<std::int64_t> reached_at;
};

BudgetResult min_within_budget(const TernaryDyadic& x, const Rational& epsilon, const Rational& threshold);

struct DensityFit {
    bool has_deficit = false; // false when every fraction is 1
    double C = 0;
    double D = 1;
};

struct DensityEstimate {
    std::vector<Rational> r_grid;
    std::vector<std::int64_t> hits;
    std::int64_t samples_per_r = 0;
    std::string method = "sampled";
    DensityFit fit;

    double fraction(std::size_t i) const { return static_cast<double>(hits[i]) / static_cast<double>(samples_per_r); }
    nlohmann::ordered_json to_json() const;
    /// R,hits,samples,fraction_approx
    std::string to_csv() const;
};

using XPredicate = std::function<bool(const TernaryDyadic&)>;

DensityEstimate real_density_estimate(const XPredicate& indicator, const std::vector<Rational>& r_grid,
                                      std::int64_t samples_per_r, std::uint64_t seed, unsigned jobs = 1);

/// Least-squares slope of log(1 - fraction) on log R gives D (clamped to (0, 1]),
/// then C is the smallest constant with 1 - fraction <= C / R^D on the whole grid.
DensityFit fit_density(const std::vector<double>& r_values, const std::vector<double>& fractions);

} // namespace rcollatz
