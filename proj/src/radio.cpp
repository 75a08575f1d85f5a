#include "ltesim/radio.hpp"

#include <cmath>
#include <sstream>

namespace ltesim::radio {

namespace {

struct BandwidthRow {
    double hz;
    int prbs;
};

constexpr std::array<BandwidthRow, 6> kBandwidthTable{{
    {1.4e6, 6},
    {3e6, 15},
    {5e6, 25},
    {10e6, 50},
    {15e6, 75},
    {20e6, 100},
}};

void check_cqi(int cqi)
{
    if (cqi < kMinCqi || cqi > kMaxCqi) {
        throw std::domain_error("cqi " + std::to_string(cqi) + " outside 1..15");
    }
}

}  // namespace

CqiEntry cqi_entry(int cqi)
{
    check_cqi(cqi);
    return {cqi, static_cast<double>(kCqiEfficiencyE4[cqi - 1]) * 1e-4};
}

int prb_count(double bandwidth_hz)
{
    for (const auto& row : kBandwidthTable) {
        if (std::abs(row.hz - bandwidth_hz) < 1.0) {
            return row.prbs;
        }
    }
    std::ostringstream msg;
    msg << "unsupported bandwidth: " << bandwidth_hz / 1e6 << " MHz";
    throw ConfigError(msg.str());
}

BandwidthProfile make_bandwidth(double bandwidth_hz)
{
    return BandwidthProfile{bandwidth_hz, prb_count(bandwidth_hz)};
}

int sinr_to_cqi(double sinr_db)
{
    const double capacity = kShannonAttenuation * std::log2(1.0 + std::pow(10.0, sinr_db / 10.0));
    int cqi = kMinCqi;
    for (int c = kMinCqi; c <= kMaxCqi; ++c) {
        if (static_cast<double>(kCqiEfficiencyE4[c - 1]) * 1e-4 <= capacity) {
            cqi = c;
        } else {
            break;
        }
    }
    return cqi;
}

std::int64_t transport_block_bits(int cqi, int n_prb)
{
    check_cqi(cqi);
    if (n_prb < 0) {
        throw std::domain_error("negative PRB count");
    }
    return kCqiEfficiencyE4[cqi - 1] * kUsableRePerPrb * n_prb / 10'000;
}

}  // namespace ltesim::radio
