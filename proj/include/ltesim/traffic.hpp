#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ltesim/random.hpp"

namespace ltesim::traffic {

enum class FlowClass { video, voip, best_effort };

inline constexpr std::string_view to_string(FlowClass c)
{
    switch (c) {
        case FlowClass::video: return "video";
        case FlowClass::voip: return "voip";
        case FlowClass::best_effort: return "best_effort";
    }
    return "?";
}

inline constexpr bool is_real_time(FlowClass c) { return c != FlowClass::best_effort; }

inline constexpr double kInfiniteBudget = std::numeric_limits<double>::infinity();
inline constexpr std::int64_t kMaxPacketBytes = 1500;
// Slack on time comparisons; all scheduling times are multiples of the TTI.
inline constexpr double kTimeEpsilon = 1e-9;

struct Packet {
    std::uint64_t id = 0;
    std::int64_t size_bits = 0;
    double arrival_time_s = 0.0;
    FlowClass flow_class = FlowClass::video;
};

struct FlowCounters {
    std::int64_t arrived_packets = 0;
    std::int64_t delivered_packets = 0;
    std::int64_t dropped_packets = 0;
    std::int64_t arrived_bits = 0;
    std::int64_t delivered_bits = 0;
    std::int64_t dropped_bits = 0;
    double delay_sum_s = 0.0;
    double max_delay_s = 0.0;
};

/// FIFO of packets for one flow. The front packet may be partially sent;
/// its residue stays queued and a packet counts as delivered with its last bit.
class FlowQueue {
public:
    explicit FlowQueue(double delay_budget_s = kInfiniteBudget) : budget_(delay_budget_s) {}

    void push(const Packet& p);

    /// Pops fully-sent packets at `delivery_time_s`; returns bits consumed (<= bits).
    std::int64_t deliver(std::int64_t bits, double delivery_time_s);

    /// Removes front packets older than the budget at `now_s`; returns packets dropped.
    std::int64_t drop_expired(double now_s);

    /// Keeps at least `min_bits` queued by appending packets that arrive at `now_s`.
    void ensure_backlog(std::int64_t min_bits, std::int64_t packet_bits, double now_s, FlowClass cls);

    bool empty() const { return packets_.empty(); }
    std::int64_t queued_bits() const { return queued_bits_; }
    std::int64_t queued_packets() const { return static_cast<std::int64_t>(packets_.size()); }
    double head_of_line_delay(double now_s) const;
    double delay_budget() const { return budget_; }
    bool deadline_bounded() const { return budget_ != kInfiniteBudget; }
    const FlowCounters& counters() const { return counters_; }

private:
    std::deque<Packet> packets_;
    std::int64_t front_sent_bits_ = 0;
    std::int64_t queued_bits_ = 0;
    std::uint64_t next_backlog_id_ = 0;
    double budget_;
    FlowCounters counters_;
};

/// Free-function form used by the engine loop.
inline std::int64_t drop_expired(FlowQueue& queue, double now_s) { return queue.drop_expired(now_s); }

enum class FrameType { I, P, B };

struct VideoFrame {
    std::int64_t index = 0;
    FrameType type = FrameType::I;
    std::int64_t size_bytes = 0;
};

struct VideoTrace {
    double fps = 30.0;
    std::vector<VideoFrame> frames;

    std::int64_t total_bytes() const;
    double mean_rate_bps() const;
};

/// Parses `fps=<n>` followed by `<index> <I|P|B> <size_bytes>` lines; `#` comments.
VideoTrace load_trace(std::string_view text);
VideoTrace load_trace_file(const std::string& path);

/// GoP IBBPBBPBB with I:P:B = 5:2:1, scaled so the mean rate matches `target_kbps`
/// (total rounded up to whole bytes, residue absorbed by the last frame).
VideoTrace synth_trace(double target_kbps, double fps, std::int64_t n_frames);

/// Splits a frame into <= 1500-byte packets.
std::vector<std::int64_t> segment_bytes(std::int64_t size_bytes);

/// Cyclic trace replay starting at `start_frame`.
class VideoSource {
public:
    VideoSource(std::shared_ptr<const VideoTrace> trace, std::size_t start_frame);
    std::vector<Packet> arrivals(double t_s, double dt, Rng& rng);

private:
    std::shared_ptr<const VideoTrace> trace_;
    std::size_t start_frame_;
    std::int64_t emitted_frames_ = 0;
    std::uint64_t next_id_ = 0;
};

struct VoipParams {
    double mean_on_s = 3.0;
    double mean_off_s = 3.0;
    std::int64_t packet_bytes = 32;
    double packet_interval_s = 0.020;
};

/// Exponential ON/OFF talk-spurt source.
class VoipSource {
public:
    VoipSource(const VoipParams& params, Rng& rng);
    /// Explicit initial state; the first switch happens at `switch_time_s`.
    VoipSource(const VoipParams& params, bool on, double switch_time_s);

    std::vector<Packet> arrivals(double t_s, double dt, Rng& rng);
    bool is_on() const { return on_; }

private:
    VoipParams params_;
    bool on_ = false;
    double switch_time_s_ = 0.0;
    double next_packet_s_ = 0.0;
    std::uint64_t next_id_ = 0;
};

/// Always backlogged; the engine tops its queue up instead of generating arrivals.
class BestEffortSource {
public:
    std::vector<Packet> arrivals(double, double, Rng&) { return {}; }
};

using TrafficSource = std::variant<VideoSource, VoipSource, BestEffortSource>;

inline std::vector<Packet> arrivals(TrafficSource& source, double t_s, double dt, Rng& rng)
{
    return std::visit([&](auto& s) { return s.arrivals(t_s, dt, rng); }, source);
}

}  // namespace ltesim::traffic
