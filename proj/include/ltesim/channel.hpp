#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "ltesim/random.hpp"

namespace ltesim::channel {

struct Position {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Random-direction mobility. Speed is constant; the heading is re-drawn at
/// boundary hits and at exponentially distributed turn epochs.
struct MobilityState {
    Position position;
    double heading = 0.0;  // radians, [0, 2pi)
    double speed_mps = 0.0;
    double time_to_turn_s = 0.0;
};

struct MobilityParams {
    double cell_radius_m = 1000.0;
    double mean_turn_epoch_s = 5.0;
};

inline double kmph_to_mps(double kmph) { return kmph / 3.6; }

MobilityState step_position(const MobilityState& state, double dt, const MobilityParams& params, Rng& rng);

/// Uniform point in the disk plus a uniform heading and a fresh turn epoch.
MobilityState initial_mobility(double speed_mps, const MobilityParams& params, Rng& rng);

inline constexpr double kMinDistanceM = 10.0;

/// -(128.1 + 37.6 log10(d_km)) + shadow + fade, distance clamped at 10 m.
double link_gain_db(double distance_m, double shadow_db, double fade_db);

struct CellLayout {
    Position serving_site;
    std::vector<Position> interferer_sites;
    double tx_power_dbm = 43.0;
    double inter_site_distance_m = 0.0;

    std::size_t site_count() const { return 1 + interferer_sites.size(); }
};

/// Serving site at the origin plus the six first-tier neighbours at sqrt(3) * radius.
CellLayout hex_layout(double cell_radius_m, double tx_power_dbm, bool with_interferers = true);

struct LinkBudget {
    int prb_count = 50;
    double noise_figure_db = 9.0;
    bool fast_fading = true;

    double noise_per_prb_dbm() const;
};

/// Per-UE channel view: position plus one shadowing draw per site (serving first).
struct UeLink {
    Position position;
    std::vector<double> shadow_db;
};

/// Rayleigh block fading: unit-mean exponential power, returned in dB.
double draw_rayleigh_fade_db(Rng& rng);

/// Downlink SINR in dB; one fading draw per link when fading is enabled.
double compute_sinr(const UeLink& ue, const CellLayout& layout, const LinkBudget& budget, Rng& rng);

/// Same computation with explicit fades (dB, serving first); deterministic.
double compute_sinr(const UeLink& ue, const CellLayout& layout, const LinkBudget& budget,
                    std::span<const double> fade_db);

/// Zero-delay wideband feedback.
int wideband_cqi(double sinr_db);

}  // namespace ltesim::channel
