#include "ltesim/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ltesim/errors.hpp"

namespace ltesim::metrics {

double jain_index(std::span<const double> x)
{
    if (x.empty()) {
        throw std::invalid_argument("jain_index of an empty set");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const double v : x) {
        if (v < 0.0) {
            throw std::invalid_argument("jain_index needs non-negative inputs");
        }
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) {
        return 1.0;
    }
    return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

std::string_view to_string(KpiClass c)
{
    switch (c) {
        case KpiClass::video: return "video";
        case KpiClass::voip: return "voip";
        case KpiClass::best_effort: return "best_effort";
        case KpiClass::all: return "all";
    }
    return "?";
}

namespace {

KpiClass class_of(FlowClass c)
{
    switch (c) {
        case FlowClass::video: return KpiClass::video;
        case FlowClass::voip: return KpiClass::voip;
        case FlowClass::best_effort: return KpiClass::best_effort;
    }
    return KpiClass::all;
}

struct Tally {
    std::int64_t arrived_packets = 0;
    std::int64_t delivered_packets = 0;
    std::int64_t dropped_packets = 0;
    std::int64_t delivered_bits = 0;
    double delay_sum = 0.0;
    double max_budget = 0.0;
    std::map<std::uint32_t, std::int64_t> bits_per_ue;
    bool any = false;

    void add(const FlowRecord& f)
    {
        any = true;
        arrived_packets += f.counters.arrived_packets;
        delivered_packets += f.counters.delivered_packets;
        dropped_packets += f.counters.dropped_packets;
        delivered_bits += f.counters.delivered_bits;
        delay_sum += f.counters.delay_sum_s;
        max_budget = std::max(max_budget, f.delay_budget_s);
        bits_per_ue[f.ue_id] += f.counters.delivered_bits;
    }
};

ClassKpi summarize(const Tally& t, double duration_s, double bandwidth_hz)
{
    ClassKpi k;
    if (duration_s > 0.0) {
        k.throughput_bps = static_cast<double>(t.delivered_bits) / duration_s;
        k.spectral_efficiency = static_cast<double>(t.delivered_bits) / (duration_s * bandwidth_hz);
    }
    if (t.delivered_packets > 0) {
        k.avg_delay_s = t.delay_sum / static_cast<double>(t.delivered_packets);
    } else if (t.any) {
        k.avg_delay_s = t.max_budget;
        k.delay_from_budget = true;
    }
    if (t.arrived_packets > 0) {
        k.plr = static_cast<double>(t.dropped_packets) / static_cast<double>(t.arrived_packets);
    }
    if (!t.bits_per_ue.empty()) {
        std::vector<double> per_ue;
        per_ue.reserve(t.bits_per_ue.size());
        for (const auto& [ue, bits] : t.bits_per_ue) {
            per_ue.push_back(static_cast<double>(bits));
        }
        k.fairness = jain_index(per_ue);
    }
    return k;
}

}  // namespace

KpiReport finalize_run(std::span<const FlowRecord> flows, double duration_s, double bandwidth_hz,
                       const RunMeta& meta)
{
    if (duration_s < 0.0) {
        throw ConfigError("run duration must be non-negative");
    }
    std::array<Tally, 4> tallies;
    for (const auto& f : flows) {
        tallies[static_cast<std::size_t>(class_of(f.flow_class))].add(f);
        tallies[static_cast<std::size_t>(KpiClass::all)].add(f);
    }

    KpiReport r;
    r.scheduler = meta.scheduler;
    r.n_ues = meta.n_ues;
    r.seed = meta.seed;
    r.seed_count = 1;
    r.duration_s = duration_s;
    r.bandwidth_hz = bandwidth_hz;
    for (const auto c : kKpiClasses) {
        r[c] = summarize(tallies[static_cast<std::size_t>(c)], duration_s, bandwidth_hz);
    }
    return r;
}

KpiReport aggregate(std::span<const KpiReport> reports)
{
    if (reports.empty()) {
        throw ConfigError("cannot aggregate an empty report list");
    }
    const auto& first = reports.front();
    KpiReport out;
    out.scheduler = first.scheduler;
    out.n_ues = first.n_ues;
    out.duration_s = first.duration_s;
    out.bandwidth_hz = first.bandwidth_hz;
    out.seed = static_cast<std::uint64_t>(reports.size());
    out.seed_count = 0;
    for (const auto& r : reports) {
        if (r.scheduler != first.scheduler || r.n_ues != first.n_ues) {
            throw ConfigError("cannot aggregate reports of different configurations (" + first.scheduler + "/" +
                              std::to_string(first.n_ues) + " vs " + r.scheduler + "/" +
                              std::to_string(r.n_ues) + ")");
        }
        out.seed_count += r.seed_count;
    }
    const double n = static_cast<double>(reports.size());
    for (const auto c : kKpiClasses) {
        ClassKpi acc;
        acc.fairness = 0.0;
        for (const auto& r : reports) {
            const auto& k = r[c];
            acc.throughput_bps += k.throughput_bps;
            acc.avg_delay_s += k.avg_delay_s;
            acc.plr += k.plr;
            acc.fairness += k.fairness;
            acc.spectral_efficiency += k.spectral_efficiency;
            acc.delay_from_budget = acc.delay_from_budget || k.delay_from_budget;
        }
        acc.throughput_bps /= n;
        acc.avg_delay_s /= n;
        acc.plr /= n;
        acc.fairness /= n;
        acc.spectral_efficiency /= n;
        out[c] = acc;
    }
    return out;
}

}  // namespace ltesim::metrics
