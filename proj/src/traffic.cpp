#include "ltesim/traffic.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ltesim/errors.hpp"

namespace ltesim::traffic {

void FlowQueue::push(const Packet& p)
{
    assert(p.size_bits > 0);
    packets_.push_back(p);
    queued_bits_ += p.size_bits;
    ++counters_.arrived_packets;
    counters_.arrived_bits += p.size_bits;
}

std::int64_t FlowQueue::deliver(std::int64_t bits, double delivery_time_s)
{
    std::int64_t used = 0;
    while (bits > 0 && !packets_.empty()) {
        Packet& front = packets_.front();
        const std::int64_t residue = front.size_bits - front_sent_bits_;
        const std::int64_t take = std::min(residue, bits);
        bits -= take;
        used += take;
        queued_bits_ -= take;
        counters_.delivered_bits += take;
        if (take < residue) {
            front_sent_bits_ += take;
            break;
        }
        const double delay = delivery_time_s - front.arrival_time_s;
        ++counters_.delivered_packets;
        counters_.delay_sum_s += delay;
        counters_.max_delay_s = std::max(counters_.max_delay_s, delay);
        packets_.pop_front();
        front_sent_bits_ = 0;
    }
    return used;
}

std::int64_t FlowQueue::drop_expired(double now_s)
{
    if (!deadline_bounded()) {
        return 0;
    }
    std::int64_t dropped = 0;
    while (!packets_.empty() && now_s - packets_.front().arrival_time_s > budget_ + kTimeEpsilon) {
        const std::int64_t residue = packets_.front().size_bits - front_sent_bits_;
        queued_bits_ -= residue;
        counters_.dropped_bits += residue;
        ++counters_.dropped_packets;
        packets_.pop_front();
        front_sent_bits_ = 0;
        ++dropped;
    }
    return dropped;
}

void FlowQueue::ensure_backlog(std::int64_t min_bits, std::int64_t packet_bits, double now_s, FlowClass cls)
{
    while (queued_bits_ < min_bits) {
        push(Packet{next_backlog_id_++, packet_bits, now_s, cls});
    }
}

double FlowQueue::head_of_line_delay(double now_s) const
{
    return packets_.empty() ? 0.0 : std::max(0.0, now_s - packets_.front().arrival_time_s);
}

std::int64_t VideoTrace::total_bytes() const
{
    std::int64_t total = 0;
    for (const auto& f : frames) {
        total += f.size_bytes;
    }
    return total;
}

double VideoTrace::mean_rate_bps() const
{
    if (frames.empty()) {
        return 0.0;
    }
    return static_cast<double>(total_bytes()) * 8.0 * fps / static_cast<double>(frames.size());
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

bool parse_int(std::string_view s, std::int64_t& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

[[noreturn]] void fail(const std::string& what, std::size_t line)
{
    throw ParseError(what + " at line " + std::to_string(line));
}

}  // namespace

VideoTrace load_trace(std::string_view text)
{
    VideoTrace trace;
    bool have_fps = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!have_fps) {
            if (!line.starts_with("fps=")) {
                fail("expected fps=<integer>", line_no);
            }
            std::int64_t fps = 0;
            if (!parse_int(trim(line.substr(4)), fps)) {
                fail("malformed fps value", line_no);
            }
            if (fps <= 0) {
                throw ConfigError("fps must be positive, got " + std::to_string(fps));
            }
            trace.fps = static_cast<double>(fps);
            have_fps = true;
            continue;
        }
        const auto fields = split_ws(line);
        if (fields.size() != 3) {
            fail("expected '<index> <I|P|B> <size_bytes>'", line_no);
        }
        VideoFrame frame;
        if (!parse_int(fields[0], frame.index)) {
            fail("malformed frame index", line_no);
        }
        if (fields[1] == "I") {
            frame.type = FrameType::I;
        } else if (fields[1] == "P") {
            frame.type = FrameType::P;
        } else if (fields[1] == "B") {
            frame.type = FrameType::B;
        } else {
            fail("unknown frame type", line_no);
        }
        if (!parse_int(fields[2], frame.size_bytes) || frame.size_bytes <= 0) {
            fail("frame size must be a positive integer", line_no);
        }
        trace.frames.push_back(frame);
    }
    if (!have_fps) {
        throw ParseError("missing fps header");
    }
    if (trace.frames.empty()) {
        throw ParseError("trace has no frames");
    }
    return trace;
}

VideoTrace load_trace_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open video trace '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return load_trace(buf.str());
}

VideoTrace synth_trace(double target_kbps, double fps, std::int64_t n_frames)
{
    if (target_kbps <= 0.0 || fps <= 0.0 || n_frames <= 0) {
        throw ConfigError("synthetic trace parameters must be positive");
    }
    constexpr std::string_view kGop = "IBBPBBPBB";
    auto weight = [](char t) { return t == 'I' ? 5 : (t == 'P' ? 2 : 1); };

    VideoTrace trace;
    trace.fps = fps;
    std::int64_t total_weight = 0;
    for (std::int64_t k = 0; k < n_frames; ++k) {
        const char t = kGop[static_cast<std::size_t>(k) % kGop.size()];
        total_weight += weight(t);
        trace.frames.push_back(
            {k, t == 'I' ? FrameType::I : (t == 'P' ? FrameType::P : FrameType::B), 0});
    }

    const auto total_bits = std::llround(target_kbps * 1000.0 * static_cast<double>(n_frames) / fps);
    const std::int64_t total_bytes = (total_bits + 7) / 8;
    const double bytes_per_weight = static_cast<double>(total_bytes) / static_cast<double>(total_weight);

    std::int64_t assigned = 0;
    for (std::size_t k = 0; k + 1 < trace.frames.size(); ++k) {
        const char t = kGop[k % kGop.size()];
        auto size = std::max<std::int64_t>(1, std::llround(weight(t) * bytes_per_weight));
        trace.frames[k].size_bytes = size;
        assigned += size;
    }
    trace.frames.back().size_bytes = std::max<std::int64_t>(1, total_bytes - assigned);
    return trace;
}

std::vector<std::int64_t> segment_bytes(std::int64_t size_bytes)
{
    std::vector<std::int64_t> out;
    while (size_bytes > 0) {
        const auto chunk = std::min(size_bytes, kMaxPacketBytes);
        out.push_back(chunk);
        size_bytes -= chunk;
    }
    return out;
}

VideoSource::VideoSource(std::shared_ptr<const VideoTrace> trace, std::size_t start_frame)
    : trace_(std::move(trace)), start_frame_(start_frame)
{
    if (!trace_ || trace_->frames.empty()) {
        throw ConfigError("video source needs a non-empty trace");
    }
    start_frame_ %= trace_->frames.size();
}

std::vector<Packet> VideoSource::arrivals(double t_s, double dt, Rng&)
{
    std::vector<Packet> out;
    const double end = t_s + dt;
    const auto n = trace_->frames.size();
    while (static_cast<double>(emitted_frames_) / trace_->fps < end - kTimeEpsilon) {
        const auto& frame = trace_->frames[(start_frame_ + static_cast<std::size_t>(emitted_frames_)) % n];
        for (const auto bytes : segment_bytes(frame.size_bytes)) {
            out.push_back(Packet{next_id_++, bytes * 8, t_s, FlowClass::video});
        }
        ++emitted_frames_;
    }
    return out;
}

VoipSource::VoipSource(const VoipParams& params, Rng& rng) : params_(params)
{
    std::bernoulli_distribution start_on(params.mean_on_s / (params.mean_on_s + params.mean_off_s));
    on_ = start_on(rng);
    std::exponential_distribution<double> dur(1.0 / (on_ ? params.mean_on_s : params.mean_off_s));
    switch_time_s_ = dur(rng);
    next_packet_s_ = 0.0;
}

VoipSource::VoipSource(const VoipParams& params, bool on, double switch_time_s)
    : params_(params), on_(on), switch_time_s_(switch_time_s)
{
}

std::vector<Packet> VoipSource::arrivals(double t_s, double dt, Rng& rng)
{
    std::vector<Packet> out;
    const double end = t_s + dt - kTimeEpsilon;
    for (;;) {
        if (on_ && next_packet_s_ < switch_time_s_) {
            if (next_packet_s_ >= end) {
                break;
            }
            out.push_back(Packet{next_id_++, params_.packet_bytes * 8, t_s, FlowClass::voip});
            next_packet_s_ += params_.packet_interval_s;
            continue;
        }
        if (switch_time_s_ >= end) {
            break;
        }
        on_ = !on_;
        std::exponential_distribution<double> dur(1.0 / (on_ ? params_.mean_on_s : params_.mean_off_s));
        const double switched_at = switch_time_s_;
        switch_time_s_ += dur(rng);
        if (on_) {
            next_packet_s_ = switched_at;
        }
    }
    return out;
}

}  // namespace ltesim::traffic
