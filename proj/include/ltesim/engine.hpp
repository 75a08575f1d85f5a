#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ltesim/channel.hpp"
#include "ltesim/metrics.hpp"
#include "ltesim/radio.hpp"
#include "ltesim/random.hpp"
#include "ltesim/sched.hpp"
#include "ltesim/traffic.hpp"

namespace ltesim::engine {

/// Full scenario. Defaults reproduce the vehicular multi-cell setup: 100 s,
/// 10 MHz FDD, 1 ms TTI, 1 km cell, 120 km/h, 242 kbps video.
struct SimConfig {
    double duration_s = 100.0;
    double bandwidth_hz = 10e6;
    double tti_s = 0.001;
    double cell_radius_m = 1000.0;
    double ue_speed_kmph = 120.0;
    int n_ues = 30;
    sched::Policy scheduler = sched::Policy::fls;
    std::uint64_t seed = 1;

    // Empty path selects the synthetic GoP trace below.
    std::string video_trace_path;
    double video_kbps = 242.0;
    double video_fps = 30.0;
    std::int64_t video_frames = 300;
    double delay_budget_s = 0.1;

    bool video_enabled = true;
    bool voip_enabled = true;
    bool best_effort_enabled = true;
    traffic::VoipParams voip;
    std::int64_t best_effort_packet_bytes = 1500;

    double pf_window_ttis = 1000.0;
    double rate_floor = 1.0;
    sched::ExpRuleParams exp;
    sched::LogRuleParams log;

    bool fast_fading = true;
    bool shadowing = true;
    double shadow_sigma_db = 8.0;
    double tx_power_dbm = 43.0;
    double noise_figure_db = 9.0;
    bool hex_layout = true;
    double turn_epoch_s = 5.0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    std::int64_t tti_count() const;
};

struct Ue {
    std::uint32_t id = 0;
    channel::MobilityState mobility;
    channel::UeLink link;
    double sinr_db = 0.0;
    int cqi = 1;
};

struct Flow {
    std::uint32_t id = 0;
    std::uint32_t ue_id = 0;
    traffic::FlowClass flow_class = traffic::FlowClass::video;
    traffic::FlowQueue queue;
    traffic::TrafficSource source;
    double avg_rate = 1.0;
    // FLS bookkeeping for the quota-bound check.
    double frame_quota = 0.0;
    std::int64_t frame_served_bits = 0;
    std::int64_t frame_granule_bits = 0;
};

/// Violation counters; every field must stay zero on a correct run.
struct RunDiagnostics {
    std::int64_t prb_conflicts = 0;
    std::int64_t overdelivery = 0;
    std::int64_t late_deliveries = 0;
    std::int64_t quota_violations = 0;
    std::int64_t position_violations = 0;
    std::int64_t conservation_violations = 0;
    // Informational, not a violation.
    std::int64_t exp_clamps = 0;

    std::int64_t violations() const
    {
        return prb_conflicts + overdelivery + late_deliveries + quota_violations + position_violations +
               conservation_violations;
    }
    bool operator==(const RunDiagnostics&) const = default;
};

struct RunState {
    radio::TtiClock clock;
    radio::BandwidthProfile bandwidth;
    channel::CellLayout layout;
    channel::LinkBudget link_budget;
    channel::MobilityParams mobility;
    sched::SchedulerParams sched_params;
    sched::FlsState fls;
    std::shared_ptr<const traffic::VideoTrace> trace;
    std::vector<Ue> ues;
    std::vector<Flow> flows;
    Rng mobility_rng;
    Rng fading_rng;
    Rng traffic_rng;
    RunDiagnostics diagnostics;
    sched::SchedulerDecision last_decision;
};

/// Seeded initial state: UEs uniform over the disk, per-site shadowing drawn once.
RunState make_initial_state(const SimConfig& config);

/// Mobility, SINR/CQI, arrivals, deadline drops, FLS frame refresh, allocation,
/// FIFO delivery and PF averaging, in that order.
void advance_tti(RunState& state, const SimConfig& config);

std::vector<metrics::FlowRecord> flow_records(const RunState& state);

struct RunOutcome {
    metrics::KpiReport report;
    RunDiagnostics diagnostics;
    std::vector<metrics::FlowRecord> flows;
};

RunOutcome simulate(const SimConfig& config);

metrics::KpiReport run(const SimConfig& config);

}  // namespace ltesim::engine
