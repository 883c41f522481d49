// Command-line front end: strategy detection, throughput benchmarks,
// distributional equivalence checks, and agent matches.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/bench.hpp"
#include "forge/detect.hpp"
#include "forge/engine.hpp"
#include "forge/match.hpp"
#include "forge/mcts.hpp"
#include "forge/playout.hpp"

namespace {

forge::Game load_game(const std::string& path) {
    return forge::Game::load(forge::read_file(path));
}

nlohmann::json result_to_json(const forge::BenchResult& r) {
    return {
        {"game", r.game},
        {"strategy", r.strategy},
        {"pps_standard", r.pps_standard},
        {"pps_optimised", r.pps_optimised},
        {"speedup", r.speedup},
        {"mean_len_standard", r.mean_len_standard},
        {"mean_len_optimised", r.mean_len_optimised},
        {"len_ratio", r.len_ratio},
        {"n_standard", r.n_standard},
        {"n_optimised", r.n_optimised},
        {"rejection_rate", r.rejection_rate},
        {"skipped", r.skipped},
        {"note", r.note},
    };
}

nlohmann::json report_to_json(const forge::CompareReport& report) {
    nlohmann::json j;
    j["protocol"] = {
        {"warmup_secs", report.config.warmup_secs},
        {"measure_secs", report.config.measure_secs},
        {"seed", report.config.seed},
        {"parallel_games", report.config.parallel_games},
        {"single_worker_per_measurement", true},
    };
    j["results"] = nlohmann::json::array();
    for (const auto& r : report.results) j["results"].push_back(result_to_json(r));
    j["skipped"] = nlohmann::json::array();
    for (const auto& r : report.skipped)
        j["skipped"].push_back({{"game", r.game}, {"strategy", r.strategy}, {"note", r.note}});
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : report.aggregates)
        j["aggregates"].push_back({{"strategy", a.strategy},
                                   {"num_games", a.num_games},
                                   {"min", a.min},
                                   {"median", a.median},
                                   {"mean", a.mean},
                                   {"max", a.max}});
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw forge::ConfigError("cannot write " + path);
    out << content;
}

int run_bench(const std::string& corpus, forge::BenchConfig config, const std::string& out_csv,
              const std::string& out_json, const std::string& plot_data) {
    forge::CompareReport report = forge::compare(corpus, config);
    std::printf("%-14s %-14s %12s %12s %8s %8s\n", "game", "strategy", "std pps", "opt pps",
                "speedup", "len~");
    for (const auto& r : report.results)
        std::printf("%-14s %-14s %12.1f %12.1f %7.2fx %8.3f\n", r.game.c_str(),
                    r.strategy.c_str(), r.pps_standard, r.pps_optimised, r.speedup, r.len_ratio);
    for (const auto& r : report.skipped)
        std::printf("%-14s %-14s skipped (%s)\n", r.game.c_str(), r.strategy.c_str(),
                    r.note.c_str());
    std::printf("\n%-14s %6s %8s %8s %8s %8s\n", "aggregate", "games", "min", "median", "mean",
                "max");
    for (const auto& a : report.aggregates)
        std::printf("%-14s %6d %8.2f %8.2f %8.2f %8.2f\n", a.strategy.c_str(), a.num_games, a.min,
                    a.median, a.mean, a.max);
    if (!out_csv.empty()) write_text_file(out_csv, forge::to_csv(report));
    if (!out_json.empty()) write_text_file(out_json, report_to_json(report).dump(2) + "\n");
    if (!plot_data.empty()) write_text_file(plot_data, forge::to_plot_data(report));
    return 0;
}

int run_verify(const std::string& game_path, long n, uint64_t seed) {
    forge::Game game = load_game(game_path);
    forge::EquivalenceReport report = forge::verify_equivalence(game, n, seed);
    std::printf("game:            %s\n", report.game.c_str());
    std::printf("strategy:        %s\n", report.strategy.c_str());
    std::printf("playouts:        %ld + %ld\n", report.n, report.n);
    std::printf("mean length:     %.4f standard, %.4f optimised\n", report.mean_len_standard,
                report.mean_len_optimised);
    std::printf("length ratio:    %.4f  [%s]\n", report.len_ratio,
                report.len_ok ? "ok" : "FAIL");
    std::printf("first-move chi2: %.3f (df=%ld, p=%.5f)  [%s]\n", report.chi_square, report.chi_df,
                report.chi_p, report.chi_ok ? "ok" : "FAIL");
    std::printf("outcome TVD:     %.5f\n", report.outcome_distance);
    for (const auto& w : report.warnings) std::printf("warning:         %s\n", w.c_str());
    std::printf("verdict:         %s\n", report.pass ? "PASS" : "FAIL");
    return report.pass ? 0 : 1;
}

forge::Agent parse_agent(const std::string& spec, const forge::Game& game,
                         const forge::PlayoutStrategy& strategy, int max_moves) {
    if (spec == "random") return forge::random_agent();
    if (spec.rfind("mcts:", 0) == 0) {
        int iters = std::stoi(spec.substr(5));
        if (iters < 1) throw forge::ConfigError("mcts iterations must be >= 1");
        return forge::mcts_agent(iters, forge::make_playout_fn(game, strategy,
                                                               forge::PolicySpec::uniform(),
                                                               max_moves));
    }
    throw forge::ConfigError("unknown agent \"" + spec + "\" (use random or mcts:<iters>)");
}

int run_play(const std::string& game_path, const std::string& agent_spec,
             const std::string& vs_spec, int n, uint64_t seed, bool standard_playouts) {
    forge::Game game = load_game(game_path);
    forge::PlayoutStrategy strategy =
        standard_playouts ? forge::PlayoutStrategy{} : forge::detect(game.description());
    forge::Agent a = parse_agent(agent_spec, game, strategy, 0);
    forge::Agent b = parse_agent(vs_spec, game, strategy, 0);
    forge::MatchResult match = forge::play_match(game, a, b, n, seed);
    std::printf("%s (%s playouts) vs %s over %d games of %s\n", agent_spec.c_str(),
                strategy.to_string().c_str(), vs_spec.c_str(), n, game.name().c_str());
    std::printf("wins %d  losses %d  draws %d  win rate %.3f\n", match.wins_a, match.wins_b,
                match.draws, match.win_rate_a());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"playout-forge: optimised game playouts with automatic applicability detection"};
    app.require_subcommand(1);

    auto* detect_cmd = app.add_subcommand("detect", "print the detected playout strategy");
    std::string detect_game;
    detect_cmd->add_option("--game", detect_game, "game file (.lud)")->required();

    auto* bench_cmd = app.add_subcommand("bench", "measure playout throughput over a corpus");
    std::string corpus, out_csv, out_json, plot_data;
    forge::BenchConfig bench_config;
    bool paper_protocol = false;
    bench_cmd->add_option("--corpus", corpus, "directory of .lud files")->required();
    bench_cmd->add_option("--warmup-secs", bench_config.warmup_secs, "warmup per measurement");
    bench_cmd->add_option("--measure-secs", bench_config.measure_secs, "measured window");
    bench_cmd->add_option("--seed", bench_config.seed, "base RNG seed");
    bench_cmd->add_option("--out", out_csv, "write CSV results here");
    bench_cmd->add_option("--json", out_json, "write JSON results here");
    bench_cmd->add_option("--plot-data", plot_data, "write per-strategy speedup samples here");
    bench_cmd->add_option("--parallel-games", bench_config.parallel_games,
                          "measure this many games concurrently (adds timing noise)");
    bench_cmd->add_option("--max-moves", bench_config.max_moves, "truncation cap override");
    bench_cmd->add_flag("--paper-protocol", paper_protocol, "use the 60s/600s protocol");

    auto* verify_cmd = app.add_subcommand("verify", "check optimised/standard equivalence");
    std::string verify_game;
    long verify_n = 100000;
    uint64_t verify_seed = 1;
    verify_cmd->add_option("--game", verify_game, "game file (.lud)")->required();
    verify_cmd->add_option("--n", verify_n, "playouts per implementation");
    verify_cmd->add_option("--seed", verify_seed, "base RNG seed");

    auto* play_cmd = app.add_subcommand("play", "run an agent match");
    std::string play_game, agent_spec = "mcts:2000", vs_spec = "random";
    int play_n = 100;
    uint64_t play_seed = 1;
    bool standard_playouts = false;
    play_cmd->add_option("--game", play_game, "game file (.lud)")->required();
    play_cmd->add_option("--agent", agent_spec, "first agent: random or mcts:<iters>");
    play_cmd->add_option("--vs", vs_spec, "second agent");
    play_cmd->add_option("--n", play_n, "number of games");
    play_cmd->add_option("--seed", play_seed, "base RNG seed");
    play_cmd->add_flag("--standard-playouts", standard_playouts,
                       "force the standard playout inside MCTS agents");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*detect_cmd) {
            forge::Game game = load_game(detect_game);
            std::printf("%s\n", forge::detect(game.description()).to_string().c_str());
            return 0;
        }
        if (*bench_cmd) {
            if (paper_protocol) {
                bench_config.warmup_secs = 60.0;
                bench_config.measure_secs = 600.0;
            }
            return run_bench(corpus, bench_config, out_csv, out_json, plot_data);
        }
        if (*verify_cmd) return run_verify(verify_game, verify_n, verify_seed);
        if (*play_cmd)
            return run_play(play_game, agent_spec, vs_spec, play_n, play_seed, standard_playouts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
