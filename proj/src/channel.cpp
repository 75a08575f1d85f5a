#include "ltesim/channel.hpp"

#include <algorithm>
#include <cassert>

#include "ltesim/radio.hpp"

namespace ltesim::channel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a)
{
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

// Distance along unit direction (dx, dy) from p to the circle of radius r; p inside.
double exit_distance(Position p, double dx, double dy, double r)
{
    const double b = p.x * dx + p.y * dy;
    const double c = p.x * p.x + p.y * p.y - r * r;
    return -b + std::sqrt(std::max(0.0, b * b - c));
}

}  // namespace

MobilityState step_position(const MobilityState& state, double dt, const MobilityParams& params, Rng& rng)
{
    assert(dt > 0.0);
    MobilityState next = state;
    const double r = params.cell_radius_m;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double remaining = state.speed_mps * dt;
    // Bounded: each pass either finishes the step or consumes distance to the boundary.
    for (int pass = 0; pass < 8 && remaining > 0.0; ++pass) {
        const double dx = std::cos(next.heading);
        const double dy = std::sin(next.heading);
        const double to_edge = exit_distance(next.position, dx, dy, r);
        if (remaining <= to_edge) {
            next.position.x += remaining * dx;
            next.position.y += remaining * dy;
            remaining = 0.0;
            break;
        }
        next.position.x += to_edge * dx;
        next.position.y += to_edge * dy;
        remaining -= to_edge;
        // Re-draw uniformly over the inward half-plane at the hit point.
        const double normal = std::atan2(next.position.y, next.position.x);
        next.heading = wrap_angle(normal + std::numbers::pi / 2.0 + unit(rng) * std::numbers::pi);
    }
    const double norm = next.position.norm();
    if (norm > r) {
        next.position.x *= r / norm;
        next.position.y *= r / norm;
    }

    next.time_to_turn_s -= dt;
    if (next.time_to_turn_s <= 0.0) {
        next.heading = unit(rng) * kTwoPi;
        std::exponential_distribution<double> epoch(1.0 / params.mean_turn_epoch_s);
        next.time_to_turn_s += epoch(rng);
    }
    return next;
}

MobilityState initial_mobility(double speed_mps, const MobilityParams& params, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> epoch(1.0 / params.mean_turn_epoch_s);
    MobilityState s;
    const double rho = params.cell_radius_m * std::sqrt(unit(rng));
    const double theta = unit(rng) * kTwoPi;
    s.position = {rho * std::cos(theta), rho * std::sin(theta)};
    s.heading = unit(rng) * kTwoPi;
    s.speed_mps = speed_mps;
    s.time_to_turn_s = epoch(rng);
    return s;
}

double link_gain_db(double distance_m, double shadow_db, double fade_db)
{
    const double d = std::max(distance_m, kMinDistanceM);
    return -(128.1 + 37.6 * std::log10(d / 1000.0)) + shadow_db + fade_db;
}

CellLayout hex_layout(double cell_radius_m, double tx_power_dbm, bool with_interferers)
{
    CellLayout layout;
    layout.tx_power_dbm = tx_power_dbm;
    layout.inter_site_distance_m = std::sqrt(3.0) * cell_radius_m;
    if (with_interferers) {
        for (int k = 0; k < 6; ++k) {
            const double a = k * std::numbers::pi / 3.0;
            layout.interferer_sites.push_back(
                {layout.inter_site_distance_m * std::cos(a), layout.inter_site_distance_m * std::sin(a)});
        }
    }
    return layout;
}

double LinkBudget::noise_per_prb_dbm() const
{
    return -174.0 + 10.0 * std::log10(radio::kPrbBandwidthHz) + noise_figure_db;
}

double draw_rayleigh_fade_db(Rng& rng)
{
    std::exponential_distribution<double> power(1.0);
    // Guard the log against an exact zero draw.
    return 10.0 * std::log10(std::max(power(rng), 1e-12));
}

double compute_sinr(const UeLink& ue, const CellLayout& layout, const LinkBudget& budget,
                    std::span<const double> fade_db)
{
    const double tx_per_prb = layout.tx_power_dbm - 10.0 * std::log10(budget.prb_count);
    auto shadow = [&](std::size_t site) { return site < ue.shadow_db.size() ? ue.shadow_db[site] : 0.0; };
    auto fade = [&](std::size_t site) { return site < fade_db.size() ? fade_db[site] : 0.0; };

    const double signal =
        dbm_to_mw(tx_per_prb + link_gain_db(distance(ue.position, layout.serving_site), shadow(0), fade(0)));
    double interference = 0.0;
    for (std::size_t k = 0; k < layout.interferer_sites.size(); ++k) {
        const double d = distance(ue.position, layout.interferer_sites[k]);
        interference += dbm_to_mw(tx_per_prb + link_gain_db(d, shadow(k + 1), fade(k + 1)));
    }
    const double noise = dbm_to_mw(budget.noise_per_prb_dbm());
    return 10.0 * std::log10(signal / (noise + interference));
}

double compute_sinr(const UeLink& ue, const CellLayout& layout, const LinkBudget& budget, Rng& rng)
{
    std::vector<double> fades(layout.site_count(), 0.0);
    if (budget.fast_fading) {
        for (auto& f : fades) {
            f = draw_rayleigh_fade_db(rng);
        }
    }
    return compute_sinr(ue, layout, budget, std::span<const double>(fades));
}

int wideband_cqi(double sinr_db) { return radio::sinr_to_cqi(sinr_db); }

}  // namespace ltesim::channel
