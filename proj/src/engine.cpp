#include "ltesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ltesim/errors.hpp"

namespace ltesim::engine {

namespace {

template <typename T>
void require(bool ok, const char* field, T value, const char* range)
{
    if (!ok) {
        std::ostringstream msg;
        msg << field << " = " << value << " out of range (valid: " << range << ")";
        throw ConfigError(msg.str());
    }
}

}  // namespace

void SimConfig::validate() const
{
    require(duration_s >= 0.0 && std::isfinite(duration_s), "duration_s", duration_s, ">= 0");
    radio::prb_count(bandwidth_hz);
    require(tti_s > 0.0, "tti_s", tti_s, "> 0");
    require(cell_radius_m > 0.0, "cell_radius_m", cell_radius_m, "> 0");
    require(ue_speed_kmph >= 0.0, "ue_speed_kmph", ue_speed_kmph, ">= 0");
    require(n_ues >= 0 && n_ues <= 1000, "n_ues", n_ues, "0..1000");
    require(video_kbps > 0.0, "video_kbps", video_kbps, "> 0");
    require(video_fps > 0.0, "video_fps", video_fps, "> 0");
    require(video_frames > 0, "video_frames", video_frames, "> 0");
    require(delay_budget_s > 0.0, "delay_budget_s", delay_budget_s, "> 0");
    require(voip.mean_on_s > 0.0, "voip_on_s", voip.mean_on_s, "> 0");
    require(voip.mean_off_s > 0.0, "voip_off_s", voip.mean_off_s, "> 0");
    require(voip.packet_bytes > 0, "voip_packet_bytes", voip.packet_bytes, "> 0");
    require(voip.packet_interval_s > 0.0, "voip_interval_s", voip.packet_interval_s, "> 0");
    require(best_effort_packet_bytes > 0, "be_packet_bytes", best_effort_packet_bytes, "> 0");
    require(pf_window_ttis >= 1.0, "pf_window_tti", pf_window_ttis, ">= 1");
    require(rate_floor > 0.0, "rate_floor", rate_floor, "> 0");
    require(exp.beta > 0.0 && exp.beta < 1.0, "exp_beta", exp.beta, "(0, 1)");
    require(exp.eta > 0.0 && exp.eta < 1.0, "exp_eta", exp.eta, "(0, 1)");
    require(exp.delay_weight > 0.0, "exp_delay_weight", exp.delay_weight, "> 0");
    require(log.c > 1.0, "log_c", log.c, "> 1");
    require(log.delay_weight > 0.0, "log_delay_weight", log.delay_weight, "> 0");
    require(shadow_sigma_db >= 0.0, "shadow_sigma_db", shadow_sigma_db, ">= 0");
    require(turn_epoch_s > 0.0, "turn_epoch_s", turn_epoch_s, "> 0");
}

std::int64_t SimConfig::tti_count() const { return std::llround(duration_s / tti_s); }

RunState make_initial_state(const SimConfig& config)
{
    config.validate();
    RunState s;
    s.clock.tti_duration_s = config.tti_s;
    s.clock.slot_duration_s = config.tti_s / 2.0;
    s.bandwidth = radio::make_bandwidth(config.bandwidth_hz);
    s.layout = channel::hex_layout(config.cell_radius_m, config.tx_power_dbm, config.hex_layout);
    s.link_budget = {s.bandwidth.prb_count, config.noise_figure_db, config.fast_fading};
    s.mobility = {config.cell_radius_m, config.turn_epoch_s};
    s.sched_params.policy = config.scheduler;
    s.sched_params.exp = config.exp;
    s.sched_params.log = config.log;
    s.sched_params.rate_floor = config.rate_floor;
    s.sched_params.tti_s = config.tti_s;

    s.mobility_rng = make_stream(config.seed, RngStream::mobility);
    s.fading_rng = make_stream(config.seed, RngStream::fading);
    s.traffic_rng = make_stream(config.seed, RngStream::traffic);
    Rng placement = make_stream(config.seed, RngStream::placement);
    Rng shadowing = make_stream(config.seed, RngStream::shadowing);

    if (config.video_enabled) {
        s.trace = std::make_shared<const traffic::VideoTrace>(
            config.video_trace_path.empty()
                ? traffic::synth_trace(config.video_kbps, config.video_fps, config.video_frames)
                : traffic::load_trace_file(config.video_trace_path));
    }

    const double speed = channel::kmph_to_mps(config.ue_speed_kmph);
    std::normal_distribution<double> shadow(0.0, config.shadow_sigma_db);
    for (int u = 0; u < config.n_ues; ++u) {
        Ue ue;
        ue.id = static_cast<std::uint32_t>(u);
        ue.mobility = channel::initial_mobility(speed, s.mobility, placement);
        ue.link.position = ue.mobility.position;
        ue.link.shadow_db.assign(s.layout.site_count(), 0.0);
        for (auto& sh : ue.link.shadow_db) {
            const double draw = shadow(shadowing);
            sh = config.shadowing ? draw : 0.0;
        }
        s.ues.push_back(std::move(ue));
    }

    auto add_flow = [&](std::uint32_t ue_id, traffic::FlowClass cls, traffic::TrafficSource source, double budget) {
        Flow f{static_cast<std::uint32_t>(s.flows.size()), ue_id, cls, traffic::FlowQueue(budget), std::move(source)};
        f.avg_rate = config.rate_floor;
        s.fls.at(f.id).drain = sched::fls_drain_coefficient(budget, config.tti_s * s.clock.frame_length_ttis);
        s.flows.push_back(std::move(f));
    };
    std::uniform_int_distribution<std::size_t> start_frame(0, s.trace ? s.trace->frames.size() - 1 : 0);
    for (const auto& ue : s.ues) {
        if (config.video_enabled) {
            add_flow(ue.id, traffic::FlowClass::video, traffic::VideoSource(s.trace, start_frame(s.traffic_rng)),
                     config.delay_budget_s);
        }
        if (config.voip_enabled) {
            add_flow(ue.id, traffic::FlowClass::voip, traffic::VoipSource(config.voip, s.traffic_rng),
                     config.delay_budget_s);
        }
        if (config.best_effort_enabled) {
            add_flow(ue.id, traffic::FlowClass::best_effort, traffic::BestEffortSource{}, traffic::kInfiniteBudget);
        }
    }
    return s;
}

namespace {

void check_fls_frame(RunState& s)
{
    for (auto& f : s.flows) {
        if (traffic::is_real_time(f.flow_class) &&
            static_cast<double>(f.frame_served_bits) > f.frame_quota + static_cast<double>(f.frame_granule_bits) + 1e-6) {
            ++s.diagnostics.quota_violations;
        }
        f.frame_served_bits = 0;
        f.frame_granule_bits = 0;
    }
}

}  // namespace

void advance_tti(RunState& s, const SimConfig& config)
{
    const double dt = s.clock.tti_duration_s;
    const double now = s.clock.now_s();
    const double delivery_time = now + dt;
    const int n_prb = s.bandwidth.prb_count;

    // (1) mobility, (2) SINR + CQI
    for (auto& ue : s.ues) {
        ue.mobility = channel::step_position(ue.mobility, dt, s.mobility, s.mobility_rng);
        ue.link.position = ue.mobility.position;
        if (ue.mobility.position.norm() > config.cell_radius_m + 1e-6) {
            ++s.diagnostics.position_violations;
        }
        ue.sinr_db = channel::compute_sinr(ue.link, s.layout, s.link_budget, s.fading_rng);
        ue.cqi = channel::wideband_cqi(ue.sinr_db);
    }

    // (3) arrivals, (4) deadline drops at the delivery instant
    const std::int64_t backlog_bits = radio::transport_block_bits(radio::kMaxCqi, n_prb);
    for (auto& f : s.flows) {
        for (const auto& p : traffic::arrivals(f.source, now, dt, s.traffic_rng)) {
            f.queue.push(p);
        }
        if (f.flow_class == traffic::FlowClass::best_effort) {
            f.queue.ensure_backlog(backlog_bits, config.best_effort_packet_bytes * 8, now, f.flow_class);
        }
        traffic::drop_expired(f.queue, delivery_time);
    }

    // (5) FLS quota refresh
    const bool fls = config.scheduler == sched::Policy::fls;
    if (fls && s.clock.at_frame_boundary()) {
        if (s.clock.tti_index > 0) {
            check_fls_frame(s);
        }
        for (auto& f : s.flows) {
            if (traffic::is_real_time(f.flow_class)) {
                f.frame_quota = sched::fls_quota_update(s.fls.at(f.id), static_cast<double>(f.queue.queued_bits()));
            }
        }
    }

    // (6) allocation
    std::vector<sched::FlowSnapshot> snapshots;
    snapshots.reserve(s.flows.size());
    for (const auto& f : s.flows) {
        const auto& ue = s.ues[f.ue_id];
        snapshots.push_back({f.id, f.ue_id, f.flow_class, static_cast<double>(f.queue.queued_bits()),
                             f.queue.head_of_line_delay(now), ue.cqi, sched::rate_per_prb(ue.cqi), f.avg_rate,
                             f.queue.delay_budget()});
    }
    s.last_decision = sched::allocate_subframe(snapshots, s.sched_params, n_prb, &s.fls);
    const auto& decision = s.last_decision;
    s.diagnostics.exp_clamps += decision.exp_clamps;

    int assigned = 0;
    for (const auto& prb : decision.prbs) {
        assigned += prb.has_value() ? 1 : 0;
    }
    std::int64_t granted_prbs = 0;
    std::int64_t granted_bits = 0;
    for (const auto& g : decision.grants) {
        granted_prbs += g.prbs;
        granted_bits += g.bits;
    }
    if (granted_prbs != assigned || static_cast<int>(decision.prbs.size()) != n_prb) {
        ++s.diagnostics.prb_conflicts;
    }

    // (7) FIFO delivery, (8) counters and PF averages
    std::vector<std::int64_t> served(s.flows.size(), 0);
    std::int64_t delivered_total = 0;
    for (const auto& g : decision.grants) {
        auto& f = s.flows[g.flow_id];
        served[g.flow_id] = f.queue.deliver(g.bits, delivery_time);
        delivered_total += served[g.flow_id];
        if (f.queue.deadline_bounded() &&
            f.queue.counters().max_delay_s > f.queue.delay_budget() + traffic::kTimeEpsilon) {
            ++s.diagnostics.late_deliveries;
        }
        if (fls && traffic::is_real_time(f.flow_class)) {
            f.frame_served_bits += served[g.flow_id];
            f.frame_granule_bits = std::max(f.frame_granule_bits, radio::transport_block_bits(g.cqi, 1) + 1);
        }
    }
    if (delivered_total > granted_bits) {
        ++s.diagnostics.overdelivery;
    }
    for (auto& f : s.flows) {
        f.avg_rate = sched::pf_average_update(f.avg_rate, static_cast<double>(served[f.id]), config.pf_window_ttis,
                                              config.rate_floor);
    }
    s.clock.tick();
}

std::vector<metrics::FlowRecord> flow_records(const RunState& state)
{
    std::vector<metrics::FlowRecord> out;
    out.reserve(state.flows.size());
    for (const auto& f : state.flows) {
        out.push_back({f.id, f.ue_id, f.flow_class, f.queue.counters(), f.queue.queued_packets(),
                       f.queue.queued_bits(), f.queue.delay_budget()});
    }
    return out;
}

RunOutcome simulate(const SimConfig& config)
{
    RunState state = make_initial_state(config);
    const auto n = config.tti_count();
    for (std::int64_t t = 0; t < n; ++t) {
        advance_tti(state, config);
    }
    if (config.scheduler == sched::Policy::fls && n > 0) {
        check_fls_frame(state);
    }

    RunOutcome out;
    out.flows = flow_records(state);
    for (const auto& r : out.flows) {
        const auto& c = r.counters;
        if (c.arrived_bits != c.delivered_bits + c.dropped_bits + r.queued_bits ||
            c.arrived_packets != c.delivered_packets + c.dropped_packets + r.queued_packets) {
            ++state.diagnostics.conservation_violations;
        }
    }
    out.diagnostics = state.diagnostics;
    out.report = metrics::finalize_run(out.flows, static_cast<double>(n) * config.tti_s, config.bandwidth_hz,
                                       {std::string(sched::to_string(config.scheduler)), config.n_ues, config.seed});
    return out;
}

metrics::KpiReport run(const SimConfig& config) { return simulate(config).report; }

}  // namespace ltesim::engine
