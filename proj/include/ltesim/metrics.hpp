#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "ltesim/traffic.hpp"

namespace ltesim::metrics {

using traffic::FlowClass;

/// (sum x)^2 / (N sum x^2); an all-zero input counts as perfectly fair.
double jain_index(std::span<const double> x);

/// End-of-run view of one flow.
struct FlowRecord {
    std::uint32_t flow_id = 0;
    std::uint32_t ue_id = 0;
    FlowClass flow_class = FlowClass::video;
    traffic::FlowCounters counters;
    std::int64_t queued_packets = 0;
    std::int64_t queued_bits = 0;
    double delay_budget_s = traffic::kInfiniteBudget;
};

enum class KpiClass : std::size_t { video = 0, voip = 1, best_effort = 2, all = 3 };
inline constexpr std::array<KpiClass, 4> kKpiClasses{KpiClass::video, KpiClass::voip, KpiClass::best_effort,
                                                     KpiClass::all};
std::string_view to_string(KpiClass c);

struct ClassKpi {
    double throughput_bps = 0.0;
    double avg_delay_s = 0.0;
    double plr = 0.0;
    double fairness = 1.0;
    double spectral_efficiency = 0.0;  // bits/s/Hz
    bool delay_from_budget = false;    // no delivered packets; avg_delay_s holds the budget

    bool operator==(const ClassKpi&) const = default;
};

struct KpiReport {
    std::string scheduler;
    int n_ues = 0;
    std::uint64_t seed = 0;
    int seed_count = 1;
    double duration_s = 0.0;
    double bandwidth_hz = 0.0;
    std::array<ClassKpi, 4> classes{};

    ClassKpi& operator[](KpiClass c) { return classes[static_cast<std::size_t>(c)]; }
    const ClassKpi& operator[](KpiClass c) const { return classes[static_cast<std::size_t>(c)]; }

    bool operator==(const KpiReport&) const = default;
};

struct RunMeta {
    std::string scheduler;
    int n_ues = 0;
    std::uint64_t seed = 0;
};

/// Throughput, mean delay over delivered packets, deadline-drop PLR, Jain
/// fairness over per-UE throughput and spectral efficiency, per class and overall.
KpiReport finalize_run(std::span<const FlowRecord> flows, double duration_s, double bandwidth_hz,
                       const RunMeta& meta);

/// Arithmetic mean over seeds of one (scheduler, n_ues) point.
KpiReport aggregate(std::span<const KpiReport> reports);

}  // namespace ltesim::metrics
