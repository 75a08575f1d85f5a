#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "ltesim/errors.hpp"
#include "ltesim/traffic.hpp"

using namespace ltesim;
using namespace ltesim::traffic;

namespace {

Packet pkt(std::uint64_t id, std::int64_t bits, double t, FlowClass c = FlowClass::video)
{
    return Packet{id, bits, t, c};
}

void check_conservation(const FlowQueue& q)
{
    const auto& c = q.counters();
    REQUIRE(c.arrived_bits == c.delivered_bits + c.dropped_bits + q.queued_bits());
    REQUIRE(c.arrived_packets == c.delivered_packets + c.dropped_packets + q.queued_packets());
}

}  // namespace

TEST_CASE("load_trace parses frames")
{
    const auto t = load_trace("fps=30\n0 I 3000\n1 P 800\n");
    CHECK(t.fps == 30.0);
    REQUIRE(t.frames.size() == 2);
    CHECK(t.frames[0].type == FrameType::I);
    CHECK(t.frames[0].size_bytes == 3000);
    CHECK(t.frames[1].type == FrameType::P);
    CHECK(t.frames[1].size_bytes == 800);
}

TEST_CASE("load_trace rejects bad input")
{
    CHECK_THROWS_WITH_AS(load_trace("fps=30\n0 X 3000\n"), "unknown frame type at line 2", ParseError);
    CHECK_THROWS_AS(load_trace("0 I 3000\n"), ParseError);
    CHECK_THROWS_AS(load_trace("fps=30\n"), ParseError);
    CHECK_THROWS_AS(load_trace("fps=30\n0 I -4\n"), ParseError);
    CHECK_THROWS_AS(load_trace("fps=0\n0 I 10\n"), ConfigError);
}

TEST_CASE("synthetic trace hits the target rate")
{
    const auto t = synth_trace(242.0, 30.0, 300);
    CHECK(t.frames.size() == 300);
    CHECK(t.total_bytes() == 302500);
    CHECK(t.mean_rate_bps() == doctest::Approx(242000.0));
    CHECK(t.frames[0].type == FrameType::I);
    // I:B = 5:1 up to per-frame rounding (each size is within half a byte).
    CHECK(std::abs(t.frames[0].size_bytes - 5 * t.frames[1].size_bytes) <= 3);
    CHECK(std::abs(5 * t.frames[3].size_bytes - 2 * t.frames[0].size_bytes) <= 4);

    const auto one = synth_trace(242.0, 30.0, 1);
    CHECK(one.total_bytes() == 1009);
    CHECK(std::abs(one.mean_rate_bps() - 242000.0) <= 8.0 * 30.0);
}

TEST_CASE("synthetic traces stay within a byte of the rate")
{
    for (double kbps : {64.0, 128.0, 242.0, 440.0, 1000.0}) {
        for (std::int64_t n : {1, 2, 9, 10, 31, 300, 1000}) {
            const auto t = synth_trace(kbps, 30.0, n);
            const double duration = static_cast<double>(n) / 30.0;
            REQUIRE(std::abs(t.total_bytes() * 8.0 - kbps * 1000.0 * duration) <= 8.0);
            for (const auto& f : t.frames) {
                REQUIRE(f.size_bytes > 0);
            }
        }
    }
}

TEST_CASE("segmentation at 1500 bytes")
{
    CHECK(segment_bytes(3000) == std::vector<std::int64_t>{1500, 1500});
    CHECK(segment_bytes(1501) == std::vector<std::int64_t>{1500, 1});
    CHECK(segment_bytes(32) == std::vector<std::int64_t>{32});
    CHECK(segment_bytes(0).empty());
}

TEST_CASE("video source emits frames on their timestamps")
{
    auto trace = std::make_shared<const VideoTrace>(load_trace("fps=30\n0 I 3000\n1 P 800\n"));
    VideoSource src(trace, 0);
    Rng rng = make_stream(1, RngStream::traffic);
    const auto first = src.arrivals(0.0, 0.001, rng);
    REQUIRE(first.size() == 2);
    CHECK(first[0].size_bits == 12000);
    CHECK(first[1].size_bits == 12000);

    std::int64_t bits = 24000;
    int frames = 1;
    for (int k = 1; k < 1000; ++k) {
        const auto p = src.arrivals(k * 0.001, 0.001, rng);
        if (!p.empty()) {
            ++frames;
        }
        for (const auto& x : p) {
            bits += x.size_bits;
            CHECK(x.arrival_time_s == k * 0.001);
        }
    }
    CHECK(frames == 30);
    CHECK(bits == 15 * (24000 + 6400));
}

TEST_CASE("VoIP ON emits 50 packets per second, OFF emits nothing")
{
    VoipParams params;
    Rng rng = make_stream(1, RngStream::traffic);

    VoipSource on(params, true, 10.0);
    std::size_t count = 0;
    for (int k = 0; k < 1000; ++k) {
        for (const auto& p : on.arrivals(k * 0.001, 0.001, rng)) {
            CHECK(p.size_bits == 32 * 8);
            ++count;
        }
    }
    CHECK(count == 50);

    VoipSource off(params, false, 10.0);
    CHECK(off.arrivals(0.0, 1.0, rng).empty());
}

TEST_CASE("VoIP long-run activity is about half the time")
{
    VoipParams params;
    Rng rng = make_stream(4, RngStream::traffic);
    VoipSource src(params, rng);
    std::size_t count = 0;
    const int ttis = 600000;
    for (int k = 0; k < ttis; ++k) {
        count += src.arrivals(k * 0.001, 0.001, rng).size();
    }
    // 600 s at 50 packets/s with duty cycle 1/2.
    CHECK(static_cast<double>(count) == doctest::Approx(15000.0).epsilon(0.1));
}

TEST_CASE("drop_expired examples")
{
    FlowQueue q(0.1);
    q.push(pkt(0, 100, 0.0));
    q.push(pkt(1, 100, 0.05));
    q.push(pkt(2, 100, 0.2));
    CHECK(drop_expired(q, 0.15) == 1);
    CHECK(q.queued_packets() == 2);
    CHECK(q.counters().dropped_packets == 1);
    CHECK(q.head_of_line_delay(0.15) == doctest::Approx(0.1));

    FlowQueue inf;
    inf.push(pkt(0, 100, 0.0));
    CHECK(drop_expired(inf, 1e6) == 0);

    FlowQueue empty(0.1);
    CHECK(drop_expired(empty, 5.0) == 0);
}

TEST_CASE("delivery is FIFO with partial packets")
{
    FlowQueue q(0.1);
    q.push(pkt(0, 1000, 0.0));
    q.push(pkt(1, 500, 0.002));
    CHECK(q.deliver(600, 0.001) == 600);
    CHECK(q.counters().delivered_packets == 0);
    CHECK(q.deliver(600, 0.003) == 600);
    CHECK(q.counters().delivered_packets == 1);
    CHECK(q.counters().delay_sum_s == doctest::Approx(0.003));
    CHECK(q.deliver(10000, 0.004) == 300);
    CHECK(q.counters().delivered_packets == 2);
    CHECK(q.empty());
    check_conservation(q);
}

TEST_CASE("backlog top-up keeps best-effort queues full")
{
    FlowQueue q;
    q.ensure_backlog(33328, 12000, 0.0, FlowClass::best_effort);
    CHECK(q.queued_bits() >= 33328);
    CHECK(q.queued_bits() < 33328 + 12000);
    q.deliver(33328, 0.001);
    q.ensure_backlog(33328, 12000, 0.001, FlowClass::best_effort);
    CHECK(q.queued_bits() >= 33328);
    check_conservation(q);
}

TEST_CASE("queue conserves bits and packets under random operations")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> op(0, 2);
    std::uniform_int_distribution<std::int64_t> size(1, 20000);
    FlowQueue q(0.1);
    double t = 0.0;
    for (int i = 0; i < 20000; ++i) {
        switch (op(rng)) {
            case 0: q.push(pkt(static_cast<std::uint64_t>(i), size(rng), t)); break;
            case 1:
                q.drop_expired(t + 0.001);
                q.deliver(size(rng), t + 0.001);
                break;
            case 2: q.drop_expired(t + 0.001); break;
        }
        check_conservation(q);
        REQUIRE(q.queued_bits() >= 0);
        REQUIRE(q.counters().max_delay_s <= 0.1 + 1e-9);
        t += 0.001;
    }
}
