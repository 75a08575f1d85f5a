#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ltesim/errors.hpp"

namespace ltesim::radio {

inline constexpr double kSubcarrierSpacingHz = 15'000.0;
inline constexpr double kPrbBandwidthHz = 180'000.0;
// 168 gross REs per PRB pair minus control and reference-signal overhead.
inline constexpr int kUsableRePerPrb = 120;
inline constexpr int kMinCqi = 1;
inline constexpr int kMaxCqi = 15;
inline constexpr double kShannonAttenuation = 0.6;

// Efficiencies in units of 1e-4 bits/RE so the TBS floor is exact integer arithmetic.
inline constexpr std::array<std::int64_t, 15> kCqiEfficiencyE4{
    1523,   // QPSK
    2344,   //
    3770,   //
    6016,   //
    8770,   //
    11758,  //
    14766,  // 16QAM
    19141,  //
    24063,  //
    27305,  // 64QAM
    33223,  //
    39023,  //
    45234,  //
    51152,  //
    55547,  //
};

struct CqiEntry {
    int cqi;
    double efficiency_bits_per_re;
};

/// Table row for `cqi`; throws std::domain_error outside 1..15.
CqiEntry cqi_entry(int cqi);

struct BandwidthProfile {
    double bandwidth_hz;
    int prb_count;
    double subcarrier_spacing_hz = kSubcarrierSpacingHz;
    double prb_bandwidth_hz = kPrbBandwidthHz;
};

/// Standard LTE channel bandwidth to PRB mapping (1.4/3/5/10/15/20 MHz).
int prb_count(double bandwidth_hz);

BandwidthProfile make_bandwidth(double bandwidth_hz);

/// Largest CQI whose efficiency fits under 0.6 x Shannon capacity, clamped to [1, 15].
int sinr_to_cqi(double sinr_db);

/// floor(efficiency(cqi) * 120 * n_prb), exact.
std::int64_t transport_block_bits(int cqi, int n_prb);

struct TtiClock {
    std::int64_t tti_index = 0;
    double tti_duration_s = 0.001;
    double slot_duration_s = 0.0005;
    int frame_length_ttis = 10;

    double now_s() const { return static_cast<double>(tti_index) * tti_duration_s; }
    bool at_frame_boundary() const { return tti_index % frame_length_ttis == 0; }
    void tick() { ++tti_index; }
};

}  // namespace ltesim::radio
