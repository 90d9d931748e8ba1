// Command line front end: classify, speed, couple, simulate, verify.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "erw/erw.hpp"
#include "erw/io.hpp"

namespace {

erw::CookieEnvironment env_arg(const std::string& text) {
    try {
        return erw::CookieEnvironment::parse(text);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--env", e.what());
    }
}

void emit(const erw::json& j, const std::string& out) {
    const auto text = j.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    erw::write_file(out, [&](std::ostream& os) { os << text; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Excited random walks in finite cookie environments"};
    app.require_subcommand(1);

    std::string env_text, p_text, q_text, table_out, trace_out, out, seed_text = "1";
    std::vector<std::string> suites;
    double tol = 1e-10;
    std::uint64_t steps = 1000, episodes = 100000;
    bool timing = false;

    auto* classify_cmd = app.add_subcommand("classify", "drift and regime of an environment");
    classify_cmd->add_option("--env", env_text, "comma-separated cookie strengths, e.g. 0.9,0.8")->required();

    auto* speed_cmd = app.add_subcommand("speed", "limiting speed");
    speed_cmd->add_option("--env", env_text, "comma-separated cookie strengths")->required();
    speed_cmd->add_option("--tol", tol, "relative tolerance on the stationary mean");

    auto* couple_cmd = app.add_subcommand("couple", "decide p <= q and build a coupling table");
    couple_cmd->add_option("--p", p_text, "first environment")->required();
    couple_cmd->add_option("--q", q_text, "second environment")->required();
    couple_cmd->add_option("--table", table_out, "write the coupling table as CSV");

    auto* sim_cmd = app.add_subcommand("simulate", "run one walk");
    sim_cmd->add_option("--env", env_text, "comma-separated cookie strengths")->required();
    sim_cmd->add_option("--steps", steps, "number of steps")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", seed_text, "decimal or 0x-prefixed hex seed");
    sim_cmd->add_option("--trace", trace_out, "write (step, position) as CSV");

    auto* verify_cmd = app.add_subcommand("verify", "run named experiments");
    verify_cmd->add_option("--suite", suites, "experiment names or paper-all")->required();
    verify_cmd->add_option("--seed", seed_text, "decimal or 0x-prefixed hex seed");
    verify_cmd->add_option("--episodes", episodes, "Monte Carlo episodes")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--out", out, "report path (default stdout)");
    verify_cmd->add_flag("--timing", timing, "include wall time in the report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify_cmd) {
            const auto env = env_arg(env_text);
            emit({{"env", erw::to_json(env)}, {"delta", env.drift()}, {"regime", erw::to_json(erw::classify(env))}}, "");
        } else if (*speed_cmd) {
            const auto env = env_arg(env_text);
            emit(erw::to_json(erw::speed(env, tol)), "");
        } else if (*couple_cmd) {
            const auto p = env_arg(p_text), q = env_arg(q_text);
            const auto verdict = erw::decide_order(p, q);
            if (!table_out.empty()) {
                if (!verdict.certificate) {
                    std::cerr << "no coupling table: verdict " << erw::to_string(verdict.order) << "\n";
                    return 2;
                }
                erw::write_file(table_out, [&](std::ostream& os) { erw::write_coupling_csv(os, *verdict.certificate); });
            }
            emit(erw::to_json(verdict), "");
        } else if (*sim_cmd) {
            const auto env = env_arg(env_text);
            const auto seed = erw::parse_seed(seed_text);
            const erw::TrialField field(env, seed);
            const auto trace = erw::run_walk(field, steps);
            if (!trace_out.empty())
                erw::write_file(trace_out, [&](std::ostream& os) { erw::write_trace_csv(os, trace); });
            const auto ex = erw::excursion_stats(trace);
            erw::json j{{"env", erw::to_json(env)},
                        {"seed", seed},
                        {"steps", steps},
                        {"final_position", trace.positions.back()},
                        {"first_step_right", ex.first_step_right}};
            j["first_return"] = ex.first_return ? erw::json(*ex.first_return) : erw::json("censored");
            emit(j, "");
        } else if (*verify_cmd) {
            erw::SuiteConfig config;
            config.seed = erw::parse_seed(seed_text);
            config.episodes = episodes;
            std::vector<erw::ExperimentReport> reports;
            for (const auto& name : suites) {
                const auto t0 = std::chrono::steady_clock::now();
                auto part = erw::run_suite({name}, config);
                const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                for (auto& r : part) {
                    if (timing) r.runtime_seconds = dt / static_cast<double>(part.size());
                    reports.push_back(std::move(r));
                }
            }
            const auto j = erw::to_json(reports);
            emit(j, out);
            return j["passed"].get<bool>() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
