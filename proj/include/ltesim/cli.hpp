#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ltesim/engine.hpp"
#include "ltesim/metrics.hpp"

namespace ltesim::cli {

/// `key = value` lines with `#` comments; unspecified keys keep their defaults.
engine::SimConfig parse_config(std::string_view text);
engine::SimConfig load_config_file(const std::filesystem::path& path);

struct SweepSpec {
    std::vector<sched::Policy> schedulers{sched::Policy::fls, sched::Policy::exp, sched::Policy::log};
    std::vector<int> ue_counts{10, 20, 30, 40, 50, 60};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    engine::SimConfig base;
};

/// One aggregated report per (scheduler, ue_count), ordered by the scheduler
/// list then ascending ue_count. Runs execute on `threads` workers (0 = all cores).
std::vector<metrics::KpiReport> run_sweep(const SweepSpec& spec, unsigned threads = 0);

inline constexpr std::string_view kCsvHeader =
    "scheduler,n_ues,seeds,flow_class,throughput_bps,avg_delay_s,plr,fairness,spectral_eff_bps_hz";

/// Nine significant digits, shortest form.
std::string format_number(double v);

/// results.csv body, one row per (report, flow class).
std::string results_csv(const std::vector<metrics::KpiReport>& reports);

struct CsvRow {
    std::string scheduler;
    int n_ues = 0;
    int seeds = 0;
    std::string flow_class;
    double throughput_bps = 0.0;
    double avg_delay_s = 0.0;
    double plr = 0.0;
    double fairness = 0.0;
    double spectral_efficiency = 0.0;
};

std::vector<CsvRow> parse_results_csv(std::string_view text);

enum class Figure { throughput, delay, plr, fairness, speff };
inline constexpr Figure kFigures[] = {Figure::throughput, Figure::delay, Figure::plr, Figure::fairness,
                                      Figure::speff};
std::string_view figure_file(Figure f);

/// Whitespace columns: n_ues then one column per scheduler (video class;
/// spectral efficiency uses all classes).
std::string figure_data(const std::vector<metrics::KpiReport>& reports, Figure f);

/// Writes results.csv and the five fig_*.dat files; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const std::vector<metrics::KpiReport>& reports,
                                                 const std::filesystem::path& out_dir);

}  // namespace ltesim::cli
