#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ltesim/cli.hpp"

namespace {

using namespace ltesim;

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

engine::SimConfig base_config(const std::string& path)
{
    return path.empty() ? engine::SimConfig{} : cli::load_config_file(path);
}

void print_report(const metrics::KpiReport& r)
{
    std::cout << "scheduler " << r.scheduler << ", " << r.n_ues << " UEs, seed " << r.seed << ", "
              << r.duration_s << " s\n";
    for (const auto c : metrics::kKpiClasses) {
        const auto& k = r[c];
        std::cout << "  " << metrics::to_string(c) << ": throughput " << cli::format_number(k.throughput_bps)
                  << " bps, delay " << cli::format_number(k.avg_delay_s) << " s, plr "
                  << cli::format_number(k.plr) << ", fairness " << cli::format_number(k.fairness)
                  << ", spectral eff " << cli::format_number(k.spectral_efficiency) << " b/s/Hz\n";
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LTE downlink packet scheduler simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scheduler;
    int ues = -1;
    long long seed = -1;
    std::string out_dir;

    auto* simulate = app.add_subcommand("simulate", "Run one simulation and print its KPIs");
    simulate->add_option("--config", config_path, "Config file (key = value)");
    simulate->add_option("--scheduler", scheduler, "PF | EXP | LOG | FLS");
    simulate->add_option("--ues", ues, "Number of UEs");
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--out", out_dir, "Write results.csv and plot data here");

    std::string sweep_schedulers = "FLS,EXP,LOG";
    std::string sweep_ues = "10,20,30,40,50,60";
    int seeds = 5;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Schedulers x user counts x seeds, averaged per point");
    sweep->add_option("--config", config_path, "Base config file");
    sweep->add_option("--scheduler", sweep_schedulers, "Comma-separated schedulers")->capture_default_str();
    sweep->add_option("--ues", sweep_ues, "Comma-separated user counts")->capture_default_str();
    sweep->add_option("--seeds", seeds, "Seeds per point (1..N, offset by --seed)")->capture_default_str();
    sweep->add_option("--seed", seed, "First seed");
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sweep->add_option("--out", out_dir, "Output directory")->required();

    auto* validate = app.add_subcommand("validate-config", "Parse and validate a config file");
    validate->add_option("--config", config_path, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto c = cli::load_config_file(config_path);
            std::cout << "ok: " << sched::to_string(c.scheduler) << ", " << c.n_ues << " UEs, " << c.duration_s
                      << " s, " << c.bandwidth_hz / 1e6 << " MHz\n";
            return EXIT_SUCCESS;
        }

        auto config = base_config(config_path);
        if (*simulate) {
            if (!scheduler.empty()) config.scheduler = sched::parse_policy(scheduler);
            if (ues >= 0) config.n_ues = ues;
            if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
            const auto outcome = engine::simulate(config);
            print_report(outcome.report);
            if (outcome.diagnostics.violations() != 0) {
                std::cerr << "invariant violations: " << outcome.diagnostics.violations() << '\n';
                return EXIT_FAILURE;
            }
            if (!out_dir.empty()) {
                cli::write_outputs({outcome.report}, out_dir);
            }
            return EXIT_SUCCESS;
        }

        cli::SweepSpec spec;
        spec.base = config;
        spec.schedulers.clear();
        for (const auto& s : split_list(sweep_schedulers)) {
            spec.schedulers.push_back(sched::parse_policy(s));
        }
        spec.ue_counts.clear();
        for (const auto& s : split_list(sweep_ues)) {
            spec.ue_counts.push_back(std::stoi(s));
        }
        if (seeds < 1) {
            throw ConfigError("--seeds must be >= 1");
        }
        const auto first = seed >= 0 ? static_cast<std::uint64_t>(seed) : 1;
        spec.seeds.clear();
        for (int k = 0; k < seeds; ++k) {
            spec.seeds.push_back(first + static_cast<std::uint64_t>(k));
        }
        const auto reports = cli::run_sweep(spec, threads);
        for (const auto& p : cli::write_outputs(reports, out_dir)) {
            std::cout << "wrote " << p.string() << '\n';
        }
        return EXIT_SUCCESS;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
}
