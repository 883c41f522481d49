#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "forge/detect.hpp"
#include "forge/engine.hpp"
#include "forge/playout.hpp"
#include "forge/rng.hpp"

namespace forge {

// ----------------------------------------------------------------------
// measure: playouts per second for one (game, strategy) pair
// ----------------------------------------------------------------------

struct MeasureResult {
    double playouts_per_sec = 0.0;
    double mean_length = 0.0;
    long playout_count = 0;
    double rejection_rate = 0.0;  // rejections / (rejections + applied moves)
    long truncated = 0;
};

namespace detail {

inline void require_strategy_applies(const Game& game, const PlayoutStrategy& strategy) {
    if (strategy.tag == PlayoutStrategy::Tag::Standard) return;
    PlayoutStrategy detected = detect(game.description());
    if (detected.tag != strategy.tag)
        throw ConfigError("game " + game.name() + " detects " + detected.to_string() +
                          ", not " + strategy.to_string());
}

}  // namespace detail

// Runs complete playouts from the initial state for `measure_secs` of wall
// clock after `warmup_secs` of warming up; only playouts finishing inside
// the window are counted. The playout sequence is deterministic in `seed`.
inline MeasureResult measure(const Game& game, const PlayoutStrategy& strategy,
                             double warmup_secs, double measure_secs, uint64_t seed,
                             int max_moves = 0) {
    if (warmup_secs < 0 || measure_secs <= 0) throw ConfigError("bad measurement window");
    detail::require_strategy_applies(game, strategy);
    using clock = std::chrono::steady_clock;
    const GameState start = game.initial_state();
    PlayoutConfig cfg;
    cfg.max_moves = max_moves;

    auto run_for = [&](double secs, uint64_t stream, MeasureResult* out) {
        auto t0 = clock::now();
        auto deadline = t0 + std::chrono::duration_cast<clock::duration>(
                                 std::chrono::duration<double>(secs));
        long count = 0, moves = 0, rejections = 0, truncated = 0;
        for (uint64_t i = 0;; ++i) {
            if (clock::now() >= deadline) break;
            cfg.rng_seed = Rng::derive(stream, i);
            PlayoutResult r = run_playout(game, strategy, start, cfg);
            if (clock::now() > deadline) break;  // did not finish inside the window
            ++count;
            moves += r.length;
            rejections += r.rejections;
            truncated += r.truncated ? 1 : 0;
        }
        if (out) {
            out->playout_count = count;
            out->mean_length = count ? static_cast<double>(moves) / count : 0.0;
            out->playouts_per_sec = count / secs;
            out->rejection_rate =
                (rejections + moves) ? static_cast<double>(rejections) / (rejections + moves) : 0.0;
            out->truncated = truncated;
        }
    };

    if (warmup_secs > 0) run_for(warmup_secs, seed ^ 0x5743u, nullptr);
    MeasureResult result;
    run_for(measure_secs, seed, &result);
    return result;
}

// ----------------------------------------------------------------------
// compare: the Table 1 protocol over a corpus directory
// ----------------------------------------------------------------------

struct BenchResult {
    std::string game;
    std::string strategy;
    double pps_standard = 0.0;
    double pps_optimised = 0.0;
    double speedup = 0.0;
    double mean_len_standard = 0.0;
    double mean_len_optimised = 0.0;
    double len_ratio = 0.0;
    long n_standard = 0;
    long n_optimised = 0;
    double rejection_rate = 0.0;
    bool skipped = false;
    std::string note;  // skip reason or per-game failure

    static BenchResult from_measurements(const std::string& game, const std::string& strategy,
                                         const MeasureResult& std_m, const MeasureResult& opt_m) {
        BenchResult r;
        r.game = game;
        r.strategy = strategy;
        r.pps_standard = std_m.playouts_per_sec;
        r.pps_optimised = opt_m.playouts_per_sec;
        r.speedup = std_m.playouts_per_sec > 0 ? opt_m.playouts_per_sec / std_m.playouts_per_sec : 0;
        r.mean_len_standard = std_m.mean_length;
        r.mean_len_optimised = opt_m.mean_length;
        r.len_ratio = std_m.mean_length > 0 ? opt_m.mean_length / std_m.mean_length : 0;
        r.n_standard = std_m.playout_count;
        r.n_optimised = opt_m.playout_count;
        r.rejection_rate = opt_m.rejection_rate;
        return r;
    }
};

// One Table 1 row: aggregate speedups for a strategy (or for "All").
struct AggregateRow {
    std::string strategy;
    int num_games = 0;
    double min = 0.0, median = 0.0, mean = 0.0, max = 0.0;
};

inline AggregateRow aggregate_speedups(const std::string& label, std::vector<double> speedups) {
    AggregateRow row;
    row.strategy = label;
    row.num_games = static_cast<int>(speedups.size());
    if (speedups.empty()) return row;
    std::sort(speedups.begin(), speedups.end());
    row.min = speedups.front();
    row.max = speedups.back();
    size_t n = speedups.size();
    row.median = (n % 2) ? speedups[n / 2] : 0.5 * (speedups[n / 2 - 1] + speedups[n / 2]);
    row.mean = 0.0;
    for (double s : speedups) row.mean += s;
    row.mean /= n;
    return row;
}

struct BenchConfig {
    double warmup_secs = 5.0;
    double measure_secs = 30.0;
    uint64_t seed = 1;
    int max_moves = 0;
    int parallel_games = 1;  // >1 accepts timing noise; noted in the report
};

struct CompareReport {
    std::vector<BenchResult> results;       // measured games
    std::vector<BenchResult> skipped;       // Standard-detected or failed games
    std::vector<AggregateRow> aggregates;   // per strategy tag plus "All"
    BenchConfig config;
};

inline std::vector<std::filesystem::path> corpus_files(const std::string& corpus_dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
        if (entry.path().extension() == ".lud") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no .lud files in " + corpus_dir);
    return files;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// For every game in the corpus, measures standard and detected-optimised
// throughput and aggregates the speedups per strategy. Games detected as
// Standard are skipped with a reason; per-game failures are recorded and the
// run continues.
inline CompareReport compare(const std::string& corpus_dir, const BenchConfig& config) {
    CompareReport report;
    report.config = config;
    auto files = corpus_files(corpus_dir);

    std::mutex mu;
    auto process = [&](const std::filesystem::path& path) {
        std::string name = path.filename().string();
        try {
            Game game = Game::load(read_file(path));
            PlayoutStrategy strategy = detect(game.description());
            if (!strategy.is_optimised()) {
                BenchResult r;
                r.game = game.name();
                r.strategy = strategy.to_string();
                r.skipped = true;
                r.note = "no optimised strategy";
                std::lock_guard<std::mutex> lock(mu);
                report.skipped.push_back(std::move(r));
                return;
            }
            PlayoutStrategy standard;
            MeasureResult std_m = measure(game, standard, config.warmup_secs, config.measure_secs,
                                          config.seed, config.max_moves);
            MeasureResult opt_m = measure(game, strategy, config.warmup_secs, config.measure_secs,
                                          config.seed, config.max_moves);
            BenchResult r = BenchResult::from_measurements(game.name(), strategy.to_string(),
                                                           std_m, opt_m);
            std::lock_guard<std::mutex> lock(mu);
            report.results.push_back(std::move(r));
        } catch (const std::exception& e) {
            BenchResult r;
            r.game = name;
            r.skipped = true;
            r.note = std::string("failed: ") + e.what();
            std::lock_guard<std::mutex> lock(mu);
            report.skipped.push_back(std::move(r));
        }
    };

    if (config.parallel_games > 1) {
        std::vector<std::thread> workers;
        std::mutex queue_mu;
        size_t next = 0;
        for (int w = 0; w < config.parallel_games; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    size_t i;
                    {
                        std::lock_guard<std::mutex> lock(queue_mu);
                        if (next >= files.size()) return;
                        i = next++;
                    }
                    process(files[i]);
                }
            });
        }
        for (auto& w : workers) w.join();
    } else {
        for (const auto& path : files) process(path);
    }

    std::sort(report.results.begin(), report.results.end(),
              [](const BenchResult& a, const BenchResult& b) { return a.game < b.game; });

    std::map<std::string, std::vector<double>> per_tag;
    std::vector<double> all;
    for (const auto& r : report.results) {
        std::string tag = r.strategy;
        if (tag.rfind("Filter", 0) == 0) tag = "Filter";
        if (tag.rfind("AddToEmpty", 0) == 0) tag = "AddToEmpty";
        per_tag[tag].push_back(r.speedup);
        all.push_back(r.speedup);
    }
    for (const char* tag : {"AddToEmpty", "Filter", "NoRepetition"}) {
        auto it = per_tag.find(tag);
        if (it != per_tag.end())
            report.aggregates.push_back(aggregate_speedups(tag, it->second));
    }
    report.aggregates.push_back(aggregate_speedups("All", all));
    return report;
}

// ----------------------------------------------------------------------
// verify_equivalence: the Fig. 4 check
// ----------------------------------------------------------------------

struct EquivalenceReport {
    std::string game;
    std::string strategy;
    long n = 0;
    double mean_len_standard = 0.0;
    double mean_len_optimised = 0.0;
    double len_ratio = 0.0;
    double chi_square = 0.0;
    long chi_df = 0;
    double chi_p = 1.0;
    double outcome_distance = 0.0;  // total variation over outcome frequencies
    bool len_ok = false;
    bool chi_ok = false;
    bool pass = false;
    std::vector<std::string> warnings;
};

namespace detail {

struct PlayoutTally {
    long count = 0;
    long total_length = 0;
    std::map<uint64_t, long> first_moves;
    std::map<int, long> outcomes;  // winner player, 0 = draw, -1 = truncated

    void add(const PlayoutResult& r) {
        ++count;
        total_length += r.length;
        if (r.first_move) ++first_moves[move_table_key(*r.first_move) ^ (uint64_t(r.first_move->mover) << 56)];
        if (r.truncated) {
            ++outcomes[-1];
        } else if (r.outcome->is_draw()) {
            ++outcomes[0];
        } else {
            for (int p = 1; p <= r.outcome->player_count; ++p)
                if (r.outcome->utilities[p - 1] > 0) ++outcomes[p];
        }
    }

    double mean_length() const { return count ? static_cast<double>(total_length) / count : 0.0; }
};

// Two-sample chi-square over the union of observed categories.
inline void chi_square_two_sample(const std::map<uint64_t, long>& a, const std::map<uint64_t, long>& b,
                                  long na, long nb, double& stat, long& df, double& p,
                                  double& min_expected) {
    std::vector<uint64_t> keys;
    for (const auto& [k, v] : a) keys.push_back(k);
    for (const auto& [k, v] : b)
        if (!a.count(k)) keys.push_back(k);
    stat = 0.0;
    min_expected = 1e300;
    const double total = static_cast<double>(na + nb);
    long used = 0;
    for (uint64_t k : keys) {
        double ca = a.count(k) ? static_cast<double>(a.at(k)) : 0.0;
        double cb = b.count(k) ? static_cast<double>(b.at(k)) : 0.0;
        double col = ca + cb;
        if (col <= 0) continue;
        ++used;
        double ea = col * na / total;
        double eb = col * nb / total;
        min_expected = std::min({min_expected, ea, eb});
        stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    df = std::max<long>(1, used - 1);
    boost::math::chi_squared_distribution<double> dist(static_cast<double>(df));
    p = boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace detail

// Runs n playouts under the standard implementation and n under the detected
// optimised one (or an injected override), and checks that playout lengths
// and first-move frequencies are statistically indistinguishable.
inline EquivalenceReport verify_equivalence(
    const Game& game, long n_playouts, uint64_t seed,
    const PolicySpec& policy = PolicySpec::uniform(),
    const std::function<PlayoutResult(GameState, uint64_t)>& optimised_override = {}) {
    PlayoutStrategy strategy = detect(game.description());
    if (!strategy.is_optimised() && !optimised_override)
        throw ConfigError("game " + game.name() + " detects Standard; nothing to verify");

    EquivalenceReport report;
    report.game = game.name();
    report.strategy = strategy.to_string();
    report.n = n_playouts;

    const GameState start = game.initial_state();
    PlayoutConfig cfg;
    cfg.policy = policy;

    detail::PlayoutTally std_tally, opt_tally;
    for (long i = 0; i < n_playouts; ++i) {
        cfg.rng_seed = Rng::derive(seed, static_cast<uint64_t>(i));
        std_tally.add(standard_playout(game, start, cfg));
    }
    for (long i = 0; i < n_playouts; ++i) {
        uint64_t s = Rng::derive(seed ^ 0x0b7e151628aed2a6ULL, static_cast<uint64_t>(i));
        if (optimised_override) {
            opt_tally.add(optimised_override(start, s));
        } else {
            cfg.rng_seed = s;
            opt_tally.add(run_playout(game, strategy, start, cfg));
        }
    }

    report.mean_len_standard = std_tally.mean_length();
    report.mean_len_optimised = opt_tally.mean_length();
    report.len_ratio = report.mean_len_standard > 0
                           ? report.mean_len_optimised / report.mean_len_standard
                           : 0.0;

    double min_expected = 0.0;
    detail::chi_square_two_sample(std_tally.first_moves, opt_tally.first_moves, std_tally.count,
                                  opt_tally.count, report.chi_square, report.chi_df, report.chi_p,
                                  min_expected);

    std::map<uint64_t, long> oa, ob;
    for (const auto& [k, v] : std_tally.outcomes) oa[static_cast<uint64_t>(k + 2)] = v;
    for (const auto& [k, v] : opt_tally.outcomes) ob[static_cast<uint64_t>(k + 2)] = v;
    double tvd = 0.0;
    for (const auto& [k, v] : oa)
        tvd += std::abs(static_cast<double>(v) / std_tally.count -
                        (ob.count(k) ? static_cast<double>(ob.at(k)) / opt_tally.count : 0.0));
    for (const auto& [k, v] : ob)
        if (!oa.count(k)) tvd += static_cast<double>(v) / opt_tally.count;
    report.outcome_distance = 0.5 * tvd;

    if (n_playouts < 1000)
        report.warnings.push_back("low sample size (" + std::to_string(n_playouts) +
                                  " playouts); ratios carry high variance");
    if (min_expected < 5.0)
        report.warnings.push_back("chi-square cell with expected count < 5");

    report.len_ok = report.len_ratio >= 0.95 && report.len_ratio <= 1.05;
    report.chi_ok = report.chi_p >= 0.001;
    report.pass = report.len_ok && report.chi_ok;
    return report;
}

// ----------------------------------------------------------------------
// report rendering
// ----------------------------------------------------------------------

inline std::string to_csv(const CompareReport& report) {
    std::ostringstream os;
    os << "game,strategy,pps_standard,pps_optimised,speedup,mean_len_standard,"
          "mean_len_optimised,len_ratio,n_standard,n_optimised,rejection_rate\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& r : report.results) {
        os << r.game << ',' << r.strategy << ',' << r.pps_standard << ',' << r.pps_optimised
           << ',' << r.speedup << ',' << r.mean_len_standard << ',' << r.mean_len_optimised
           << ',' << r.len_ratio << ',' << r.n_standard << ',' << r.n_optimised << ','
           << r.rejection_rate << '\n';
    }
    return os.str();
}

// Per-strategy speedup samples for external boxplot rendering.
inline std::string to_plot_data(const CompareReport& report) {
    std::ostringstream os;
    os << "strategy,game,speedup\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& r : report.results) {
        std::string tag = r.strategy;
        if (tag.rfind("Filter", 0) == 0) tag = "Filter";
        if (tag.rfind("AddToEmpty", 0) == 0) tag = "AddToEmpty";
        os << tag << ',' << r.game << ',' << r.speedup << '\n';
    }
    return os.str();
}

}  // namespace forge
