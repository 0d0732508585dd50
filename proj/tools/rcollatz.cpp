// rcollatz: command-line front end for the real Collatz toolkit.
//
// Exit codes: 0 ok, 2 usage or config error, 3 bit-length ceiling hit,
// 4 property violation, 1 anything else.

#include <rcollatz/balanced_word.hpp>
#include <rcollatz/experiments.hpp>
#include <rcollatz/gf2_poly.hpp>
#include <rcollatz/interval.hpp>
#include <rcollatz/literal.hpp>
#include <rcollatz/orbit_graph.hpp>
#include <rcollatz/ternary_dyadic.hpp>
#include <rcollatz/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rcollatz;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCeiling = 3;
constexpr int kExitViolation = 4;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

// Collects what a run produced; the manifest goes into report.json.
class Manifest {
public:
    Manifest(std::string subcommand, Json config, std::uint64_t seed)
        : subcommand_(std::move(subcommand)), config_(std::move(config)), seed_(seed), started_(utc_now()) {}

    void write(const fs::path& dir, const std::string& name, const std::string& text) {
        write_text(dir / name, text);
        outputs_.push_back(name);
    }

    void finish(const fs::path& dir, Json result) {
        outputs_.push_back("report.json");
        Json report;
        report["schema"] = 1;
        Json m;
        m["subcommand"] = subcommand_;
        m["config"] = config_;
        m["seed"] = seed_;
        m["rng"] = std::string(kRngAlgorithm);
        m["tool_version"] = std::string(kVersion);
        m["started_at"] = started_;
        m["finished_at"] = utc_now();
        m["outputs"] = outputs_;
        report["manifest"] = std::move(m);
        report["result"] = std::move(result);
        write_text(dir / "report.json", report.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    Json config_;
    std::uint64_t seed_;
    std::string started_;
    std::vector<std::string> outputs_;
};

Json config_json(const FlatConfig& cfg) {
    Json j = Json::object();
    for (const auto& [k, v] : cfg.values()) {
        j[k] = v;
    }
    return j;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text(out, text);
    }
}

// --- orbit / word / cells -------------------------------------------------

int cmd_orbit(const std::string& literal, std::int64_t steps, const std::string& format, const std::string& out) {
    const auto values = orbit(parse_x_literal(literal), steps);
    if (format == "json") {
        Json j;
        j["schema"] = 1;
        auto rows = Json::array();
        for (std::size_t i = 0; i < values.size(); ++i) {
            rows.push_back({{"step", i},
                            {"n", values[i].significand().get_str()},
                            {"j", values[i].three_exp()},
                            {"k", values[i].two_exp()},
                            {"value", values[i].to_string()}});
        }
        j["orbit"] = std::move(rows);
        emit(out, j.dump(2) + "\n");
    } else {
        emit(out, orbit_csv(values));
    }
    return kExitOk;
}

std::string blocks_text(const BalancedWord& w) {
    std::string s;
    for (const auto& b : parse_blocks(w)) {
        s += (s.empty() ? "" : " ") + b.to_string();
    }
    return s;
}

int cmd_word(const std::string& literal, std::int64_t steps) {
    BalancedWord w = literal.find_first_of("+-") != std::string::npos ? BalancedWord::parse(literal).canonical()
                                                                       : int_to_bt(BigInt(literal, 10));
    if (!w.is_integral() || sgn(bt_to_int(w)) <= 0) {
        throw ParseError("word needs a positive integer or an integral balanced word");
    }
    std::cout << "step,word,value,appended,blocks\n";
    for (std::int64_t s = 0;; ++s) {
        const bool odd = word_parity(w) == Parity::Odd;
        const BalancedWord even = odd ? w.appended(Digit::Plus) : w;
        std::cout << s << ',' << w.to_string() << ',' << bt_to_int(w).get_str() << ','
                  << (odd ? even.to_string() : "") << ',' << blocks_text(even) << '\n';
        if (s == steps) {
            break;
        }
        w = collatz_word_step(w);
    }
    return kExitOk;
}

int cmd_cells(const std::string& r, int depth, int cap, const std::string& out) {
    if (depth < 0 || depth > cap) {
        throw ConfigError("depth " + std::to_string(depth) + " outside [0, " + std::to_string(cap) + "]");
    }
    emit(out, pattern_cells(parse_rational(r), depth, cap).to_csv());
    return kExitOk;
}

// --- experiments ----------------------------------------------------------

int cmd_remark(const std::string& config_path, const fs::path& out, unsigned jobs) {
    const auto flat = FlatConfig::read_file(config_path);
    const auto cfg = RemarkTestConfig::from_config(flat);
    Manifest manifest("remark", cfg.to_json(), cfg.seed);
    const auto report = run_remark_test(cfg, jobs);
    manifest.write(out, "trials.csv", report.trials_csv());
    manifest.write(out, "tau_histogram.csv", report.histogram_csv());
    Json result = report.to_json();
    result["trials"] = cfg.trials;
    manifest.finish(out, result);
    std::cout << "successes=" << report.successes << " failures=" << report.failures
              << " precision_exhausted=" << report.precision_exhausted << '\n';
    return kExitOk;
}

int cmd_stopping(const std::string& config_path, const fs::path& out, unsigned jobs) {
    const auto flat = FlatConfig::read_file(config_path);
    flat.reject_unknown({"seed", "samples", "lo", "hi", "threshold", "max_steps", "epsilon"});
    const auto seed = flat.unsigned_integer("seed");
    const auto samples = flat.integer("samples");
    const Rational threshold = flat.rational("threshold", Rational(9, 4));
    const Rational epsilon = flat.rational("epsilon", Rational(1, 10));
    const auto stats = stopping_time_stats(flat.rational("lo"), flat.rational("hi"), samples, threshold, seed,
                                           flat.integer("max_steps", 100000), jobs);
    Manifest manifest("stopping", config_json(flat), seed);
    std::vector<char> reached(stats.xs.size(), 0);
    parallel_for(stats.xs.size(), jobs,
                 [&](std::size_t i) { reached[i] = min_within_budget(stats.xs[i], epsilon, threshold).reached; });
    std::int64_t within = std::count(reached.begin(), reached.end(), 1);
    manifest.write(out, "samples.csv", stats.samples_csv());
    Json result = stats.to_json();
    result["budget_epsilon"] = epsilon.get_str();
    result["reached_within_budget"] = within;
    manifest.finish(out, result);
    std::cout << "mean_ratio=" << stats.mean_ratio << " exhausted=" << stats.exhausted
              << " reached_within_budget=" << within << "/" << samples << '\n';
    return kExitOk;
}

int cmd_envelope(const std::string& config_path, const fs::path& out, unsigned jobs) {
    const auto flat = FlatConfig::read_file(config_path);
    flat.reject_unknown({"seed", "samples", "lo", "hi", "epsilon", "lambdas"});
    const auto seed = flat.unsigned_integer("seed");
    const auto samples = flat.integer("samples");
    const Rational lo = flat.rational("lo");
    const Rational hi = flat.rational("hi");
    const Rational epsilon = flat.rational("epsilon");
    const auto lambdas = parse_rational_list(flat.text("lambdas", "0,1/4,1/2,3/4,1"));
    const auto survey = envelope_survey(lo, hi, samples, epsilon, lambdas, seed, jobs);
    Manifest manifest("envelope", config_json(flat), seed);
    manifest.write(out, "samples.csv", survey.to_csv());
    Json result = survey.to_json();
    result["lambdas"] = flat.text("lambdas", "0,1/4,1/2,3/4,1");
    manifest.finish(out, result);
    std::cout << "envelope_pass=" << survey.envelope_pass << "/" << samples
              << " lambda_grid_pass=" << survey.lambda_grid_pass << "/" << samples << '\n';
    return kExitOk;
}

int cmd_density(const std::string& config_path, const fs::path& out, unsigned jobs) {
    const auto flat = FlatConfig::read_file(config_path);
    flat.reject_unknown({"seed", "samples_per_r", "r_grid", "predicate", "epsilon", "threshold"});
    const auto seed = flat.unsigned_integer("seed");
    const auto grid = parse_rational_list(flat.require("r_grid"));
    const Rational epsilon = flat.rational("epsilon", Rational(1, 10));
    const Rational threshold = flat.rational("threshold", Rational(9, 4));
    const std::string kind = flat.text("predicate", "envelope");
    XPredicate predicate;
    if (kind == "envelope") {
        // Only x > 1 is constrained by the envelope; smaller x count as members.
        predicate = [epsilon](const TernaryDyadic& x) { return x <= Rational(1) || envelope_check(x, epsilon).pass; };
    } else if (kind == "budget") {
        predicate = [epsilon, threshold](const TernaryDyadic& x) {
            return x <= Rational(3, 4) || min_within_budget(x, epsilon, threshold).reached;
        };
    } else if (kind == "gt1") {
        predicate = [](const TernaryDyadic& x) { return x > Rational(1); };
    } else if (kind == "true") {
        predicate = [](const TernaryDyadic&) { return true; };
    } else {
        throw ConfigError("predicate must be one of envelope, budget, gt1, true");
    }
    const auto est = real_density_estimate(predicate, grid, flat.integer("samples_per_r"), seed, jobs);
    Manifest manifest("density", config_json(flat), seed);
    manifest.write(out, "density.csv", est.to_csv());
    manifest.finish(out, est.to_json());
    std::cout << est.to_csv();
    return kExitOk;
}

// --- graph / gf2 ----------------------------------------------------------

Label label_from_char(char c) {
    switch (c) {
    case '+':
        return Label::Plus;
    case '-':
        return Label::Minus;
    case '0':
        return Label::Zero;
    default:
        throw ParseError(std::string("label must be +, - or 0, got '") + c + "'");
    }
}

int cmd_graph(const std::string& literal, const std::string& rows, const std::string& cols, const std::string& format,
              const std::string& check, const std::vector<std::string>& corrupt, const std::string& out) {
    auto w = build_window(parse_x_literal(literal), parse_range(rows), parse_range(cols));
    for (const auto& c : corrupt) {
        // n,z,digit
        const auto a = c.find(',');
        const auto b = c.rfind(',');
        if (a == std::string::npos || a == b || b + 2 != c.size()) {
            throw ParseError("--corrupt expects n,z,digit");
        }
        w.set_label({parse_integer(c.substr(0, a)), parse_integer(c.substr(a + 1, b - a - 1))}, label_from_char(c.back()));
    }
    if (format != "dot" && format != "json") {
        throw ParseError("--format must be dot or json");
    }
    emit(out, export_graph(w, format == "dot" ? GraphFormat::Dot : GraphFormat::Json));
    std::vector<Violation> violations;
    if (check == "propagation" || check == "both") {
        auto v = check_nonzero_propagation(w);
        violations.insert(violations.end(), v.begin(), v.end());
    }
    if (check == "recurrence" || check == "both") {
        auto v = check_recurrence(w);
        violations.insert(violations.end(), v.begin(), v.end());
    }
    if (check != "none" && check != "propagation" && check != "recurrence" && check != "both") {
        throw ParseError("--check must be propagation, recurrence, both or none");
    }
    std::ostream& log = out.empty() || out == "-" ? std::cerr : std::cout;
    log << "components=" << components(w).count << " (window-relative) violations=" << violations.size() << '\n';
    for (const auto& v : violations) {
        log << "violation: " << v.detail << '\n';
    }
    return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_gf2(const std::string& map, const std::string& poly, std::int64_t iterate, int check_degree) {
    if (check_degree >= 0) {
        const auto conj = conjugacy_check(check_degree);
        const auto acc = acceleration_check(check_degree);
        std::cout << "conjugacy " << (conj.pass ? "pass" : "fail") << " checked=" << conj.checked << '\n';
        std::cout << "acceleration " << (acc.pass ? "pass" : "fail") << " checked=" << acc.checked << '\n';
        for (const auto* r : {&conj, &acc}) {
            if (r->counterexample) {
                std::cout << "counterexample " << r->counterexample->to_hex() << '\n';
            }
        }
        return conj.pass && acc.pass ? kExitOk : kExitViolation;
    }
    GF2Poly (*step)(const GF2Poly&) = nullptr;
    if (map == "s") {
        step = s_map;
    } else if (map == "s0") {
        step = s0_map;
    } else if (map == "s1") {
        step = s1_map;
    } else {
        throw ParseError("--map must be s, s0 or s1");
    }
    GF2Poly f = GF2Poly::from_hex(poly);
    std::cout << "step,hex,poly\n";
    for (std::int64_t i = 0;; ++i) {
        std::cout << i << ',' << f.to_hex() << ',' << f.to_string() << '\n';
        if (i == iterate) {
            break;
        }
        f = step(f);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and statistical tools for the real Collatz map"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    unsigned jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads for experiment trials")->check(CLI::PositiveNumber);

    std::string x;
    std::int64_t steps = 10;
    std::string format = "csv";
    std::string out;

    auto* orbit_cmd = app.add_subcommand("orbit", "Exact orbit of x");
    orbit_cmd->add_option("--x", x, std::string("Start value: ") + std::string(kXLiteralGrammar))->required();
    orbit_cmd->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
    orbit_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    orbit_cmd->add_option("--out", out, "Output file (default stdout)");

    auto* word_cmd = app.add_subcommand("word", "Word-level rewriting trace");
    word_cmd->add_option("--x", x, "Positive integer or balanced word")->required();
    word_cmd->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);

    std::string r = "0";
    int depth = 0;
    int cap = kDefaultPatternCap;
    auto* cells_cmd = app.add_subcommand("cells", "Exact parity-pattern cell measures");
    cells_cmd->add_option("--r", r, "Base point r (rational)");
    cells_cmd->add_option("--depth", depth, "Pattern length N")->required();
    cells_cmd->add_option("--cap", cap, "Largest accepted N");
    cells_cmd->add_option("--out", out, "Output file (default stdout)");

    std::string config;
    std::string out_dir = "out";
    std::vector<CLI::App*> experiment_cmds;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"remark", "Digit-prefix stopping-time trials"},
             {"stopping", "Stopping-time scaling statistics"},
             {"envelope", "Trajectory envelope checks"},
             {"density", "Real-density estimate"}}) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", config, "Flat key = value config file")->required();
        cmd->add_option("--out", out_dir, "Output directory");
        experiment_cmds.push_back(cmd);
    }

    std::string rows = "0:0";
    std::string cols = "0:0";
    std::string graph_format = "dot";
    std::string check = "both";
    std::vector<std::string> corrupt;
    auto* graph_cmd = app.add_subcommand("graph", "Digit graph window");
    graph_cmd->add_option("--x", x, std::string("Value: ") + std::string(kXLiteralGrammar))->required();
    graph_cmd->add_option("--rows", rows, "Row range a:b");
    graph_cmd->add_option("--cols", cols, "Column range a:b (positions of 3)");
    graph_cmd->add_option("--format", graph_format, "dot or json");
    graph_cmd->add_option("--check", check, "propagation, recurrence, both or none");
    graph_cmd->add_option("--corrupt", corrupt, "Overwrite a label, n,z,digit (negative control)");
    graph_cmd->add_option("--out", out, "Output file (default stdout)");

    std::string map = "s";
    std::string poly = "1";
    std::int64_t iterate = 10;
    int check_degree = -1;
    auto* gf2_cmd = app.add_subcommand("gf2", "Polynomial maps over GF(2)");
    gf2_cmd->add_option("--map", map, "s, s0 or s1");
    gf2_cmd->add_option("--poly", poly, "Start polynomial as a hex bitset");
    gf2_cmd->add_option("--iterate", iterate, "Number of steps")->check(CLI::NonNegativeNumber);
    gf2_cmd->add_option("--check-degree", check_degree, "Run the exhaustive conjugacy and acceleration checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*orbit_cmd) {
            return cmd_orbit(x, steps, format, out);
        }
        if (*word_cmd) {
            return cmd_word(x, steps);
        }
        if (*cells_cmd) {
            return cmd_cells(r, depth, cap, out);
        }
        if (*experiment_cmds[0]) {
            return cmd_remark(config, out_dir, jobs);
        }
        if (*experiment_cmds[1]) {
            return cmd_stopping(config, out_dir, jobs);
        }
        if (*experiment_cmds[2]) {
            return cmd_envelope(config, out_dir, jobs);
        }
        if (*experiment_cmds[3]) {
            return cmd_density(config, out_dir, jobs);
        }
        if (*graph_cmd) {
            return cmd_graph(x, rows, cols, graph_format, check, corrupt, out);
        }
        if (*gf2_cmd) {
            return cmd_gf2(map, poly, iterate, check_degree);
        }
    } catch (const ResourceCeiling& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCeiling;
    } catch (const std::invalid_argument& e) {
        // ParseError, ConfigError, FractionalWord, OddWord
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
