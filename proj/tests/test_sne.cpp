#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kraken/errors.hpp"
#include "kraken/sne.hpp"

using namespace kraken;
using sne::Event;
using sne::EventStream;
using sne::LifConfig;
using sne::LifLayer;
using sne::SneNetwork;

TEST_SUITE_BEGIN("sne");

TEST_CASE("lif_decay frozen examples")
{
    LifConfig half{1, 1, 1};
    CHECK(sne::lif_decay(100, 1, half) == 50);
    CHECK(sne::lif_decay(-1, 1, half) == 0); // trunc(-0.5) is 0, not -1

    LifConfig slow{1, 128, 8};
    // trunc(-7 * 128 / 256) = trunc(-3.5) = -3; an arithmetic shift
    // would give -4.
    CHECK(sne::lif_decay(-7, 1, slow) == -3);

    LifConfig gentle{1, 255, 8};
    CHECK(sne::lif_decay(127, 1, gentle) == 126); // trunc(126.503...)

    LifConfig identity{1, 4, 2};
    CHECK(sne::lif_decay(93, 1000000, identity) == 93);
    CHECK(sne::lif_decay(-55, 1000000, identity) == -55);

    LifConfig zero{1, 0, 0};
    CHECK(sne::lif_decay(77, 1, zero) == 0);
}

TEST_CASE("lif_decay composes over tick spans")
{
    std::mt19937 rng(42);
    for (int trial = 0; trial < 200; trial++)
    {
        LifConfig cfg;
        cfg.threshold = 1;
        cfg.leak_shift = static_cast<std::uint8_t>(rng() % 9);
        cfg.leak_num = static_cast<std::uint8_t>(rng() % ((1u << cfg.leak_shift) + 1));
        const auto v = static_cast<std::int8_t>(static_cast<int>(rng() % 256) - 128);
        const std::uint32_t a = rng() % 8;
        const std::uint32_t b = rng() % 8;
        CHECK(sne::lif_decay(v, a + b, cfg) ==
                sne::lif_decay(sne::lif_decay(v, a, cfg), b, cfg));
    }
}

TEST_CASE("decay never flips sign or grows magnitude")
{
    for (int shift = 0; shift <= 8; shift++)
    {
        for (int num = 0; num <= (1 << shift) && num <= 255; num++)
        {
            LifConfig cfg{1, static_cast<std::uint8_t>(num),
                    static_cast<std::uint8_t>(shift)};
            for (int v = -128; v <= 127; v++)
            {
                const int d = sne::lif_decay(static_cast<std::int8_t>(v), 1, cfg);
                CHECK(std::abs(d) <= std::abs(v));
                CHECK(d * v >= 0);
            }
        }
    }
}

TEST_CASE("inject_event scatters into the in-bounds 3x3 neighborhood")
{
    LifConfig cfg{1, 1, 0};
    LifLayer layer(3, 3, 1, 2, cfg);
    for (auto &w : layer.weights)
    {
        w = 1;
    }

    auto touched = layer.inject_event({0, 1, 1, 0}); // center
    CHECK(touched.size() == 18); // 3x3 positions x 2 output channels
    CHECK(layer.sop_count == 18);

    layer.reset_state();
    touched = layer.inject_event({0, 0, 0, 0}); // corner
    CHECK(touched.size() == 8); // 2x2 positions x 2 channels
    CHECK(layer.sop_count == 8);

    CHECK_THROWS_AS(layer.inject_event({0, 3, 0, 0}), OutOfBounds);
    CHECK_THROWS_AS(layer.inject_event({0, 0, 3, 0}), OutOfBounds);
    CHECK_THROWS_AS(layer.inject_event({0, 0, 0, 1}), OutOfBounds);
}

TEST_CASE("membrane adds saturate at the int8 rails")
{
    LifConfig cfg{127, 1, 0};
    LifLayer layer(1, 1, 1, 1, cfg);
    for (auto &w : layer.weights)
    {
        w = 7;
    }
    for (int i = 0; i < 20; i++)
    {
        layer.inject_event({0, 0, 0, 0});
    }
    CHECK(layer.membrane[0] == 127);

    for (auto &w : layer.weights)
    {
        w = -8;
    }
    layer.reset_state();
    for (int i = 0; i < 17; i++)
    {
        layer.inject_event({0, 0, 0, 0});
    }
    CHECK(layer.membrane[0] == -128);
}

TEST_CASE("end_of_tick fires, resets and sorts emissions")
{
    LifConfig cfg{2, 1, 0};
    LifLayer layer(2, 2, 1, 2, cfg);
    for (auto &w : layer.weights)
    {
        w = 2;
    }
    layer.inject_event({5, 0, 0, 0});
    const auto fired = layer.end_of_tick(5);
    // All four positions of both channels got +2 from the corner scatter?
    // No: the corner event reaches positions (0,0),(1,0),(0,1),(1,1) in
    // both channels, each with one weight add of 2 >= threshold.
    REQUIRE(fired.size() == 8);
    for (std::size_t i = 1; i < fired.size(); i++)
    {
        const auto &a = fired[i - 1];
        const auto &b = fired[i];
        const bool ordered = a.c < b.c ||
                (a.c == b.c && (a.y < b.y || (a.y == b.y && a.x < b.x)));
        CHECK(ordered);
        CHECK(b.tick == 5);
    }
    for (const auto v : layer.membrane)
    {
        CHECK(v == 0);
    }
    CHECK(layer.spike_count == 8);
}

TEST_CASE("hand-frozen two-event run")
{
    LifConfig cfg{2, 1, 1}; // threshold 2, halving leak
    SneNetwork net;
    net.layers.emplace_back(2, 2, 1, 1, cfg);
    auto &layer = net.layers[0];
    layer.weight(0, 0, 1, 1) = 3; // onto the event's own position
    layer.weight(0, 0, 1, 2) = 1; // onto the right neighbor

    const EventStream events = {{0, 0, 0, 0}, {2, 0, 0, 0}};
    const auto result = sne::run_stream(net, events);

    REQUIRE(result.events.size() == 2);
    CHECK(result.events[0] == Event{0, 0, 0, 0});
    CHECK(result.events[1] == Event{2, 0, 0, 0});

    CHECK(result.stats.events_in == 2);
    CHECK(result.stats.events_out == 2);
    CHECK(result.stats.sop_count == 8); // 4 in-bounds targets per corner event
    CHECK(result.stats.first_tick == 0);
    CHECK(result.stats.last_tick == 2);
    CHECK(result.stats.ticks_observed == 3);
    CHECK(result.stats.input_activity == doctest::Approx(2.0 / 12.0));
    REQUIRE(result.stats.spikes_per_layer.size() == 1);
    CHECK(result.stats.spikes_per_layer[0] == 2);
    CHECK(result.stats.activity_per_layer[0] == doctest::Approx(2.0 / 12.0));

    // Fired neuron is reset; the right neighbor keeps its +1 from tick 2.
    CHECK(net.layers[0].membrane[0] == 0);
    CHECK(net.layers[0].membrane[1] == 1);
    CHECK(net.layers[0].membrane[2] == 0);
    CHECK(net.layers[0].membrane[3] == 0);
}

TEST_CASE("threshold guarantees untouched neurons never fire")
{
    // A neuron that receives no input can only decay toward zero, and
    // thresholds are at least 1, so skipping untouched neurons at the fire
    // check is exact. Cross-check on a long quiet gap.
    LifConfig cfg{1, 3, 2};
    SneNetwork net;
    net.layers.emplace_back(4, 4, 1, 1, cfg);
    for (auto &w : net.layers[0].weights)
    {
        w = 1;
    }
    const EventStream events = {{0, 1, 1, 0}, {1000000, 2, 2, 0}};
    auto even = net;
    const auto a = sne::run_stream(even, events);
    auto odd = net;
    const auto b = sne::dense_reference(odd, events);
    CHECK(a.events == b.events);
}

namespace {

struct RandomCase {
    SneNetwork net;
    EventStream events;
};

RandomCase make_random_case(std::uint32_t seed)
{
    std::mt19937 rng(seed);
    const auto h = static_cast<std::uint16_t>(2 + rng() % 5);
    const auto w = static_cast<std::uint16_t>(2 + rng() % 5);
    const auto c_in = static_cast<std::uint16_t>(1 + rng() % 3);
    const auto c_mid = static_cast<std::uint16_t>(1 + rng() % 3);
    const int layers = 1 + static_cast<int>(rng() % 2);

    RandomCase out;
    std::uint16_t cin = c_in;
    for (int l = 0; l < layers; l++)
    {
        LifConfig cfg;
        cfg.threshold = static_cast<std::int8_t>(1 + rng() % 6);
        cfg.leak_shift = static_cast<std::uint8_t>(rng() % 9);
        cfg.leak_num = static_cast<std::uint8_t>(
                rng() % ((1u << cfg.leak_shift) + 1));
        LifLayer layer(h, w, cin, c_mid, cfg);
        for (auto &wt : layer.weights)
        {
            wt = static_cast<std::int8_t>(static_cast<int>(rng() % 16) - 8);
        }
        out.net.layers.push_back(std::move(layer));
        cin = c_mid;
    }

    const std::uint32_t ticks = 1 + rng() % 20;
    const std::size_t count = rng() % 120;
    std::vector<std::uint32_t> tick_values(count);
    for (auto &t : tick_values)
    {
        t = rng() % ticks;
    }
    std::sort(tick_values.begin(), tick_values.end());
    for (const auto t : tick_values)
    {
        Event e;
        e.tick = t;
        e.x = static_cast<std::uint16_t>(rng() % w);
        e.y = static_cast<std::uint16_t>(rng() % h);
        e.c = static_cast<std::uint16_t>(rng() % c_in);
        out.events.push_back(e);
    }
    return out;
}

} // namespace

TEST_CASE("event-driven run equals the dense reference")
{
    for (std::uint32_t seed = 1; seed <= 12; seed++)
    {
        CAPTURE(seed);
        auto rc = make_random_case(seed);
        auto net_event = rc.net;
        auto net_dense = rc.net;
        const auto a = sne::run_stream(net_event, rc.events);
        const auto b = sne::dense_reference(net_dense, rc.events);

        CHECK(a.events == b.events);
        CHECK(a.stats.events_in == b.stats.events_in);
        CHECK(a.stats.events_out == b.stats.events_out);
        CHECK(a.stats.sop_count == b.stats.sop_count);
        CHECK(a.stats.spikes_per_layer == b.stats.spikes_per_layer);
        REQUIRE(net_event.layers.size() == net_dense.layers.size());
        for (std::size_t l = 0; l < net_event.layers.size(); l++)
        {
            CHECK(net_event.layers[l].membrane == net_dense.layers[l].membrane);
        }
    }
}

TEST_CASE("memory budgets")
{
    LifConfig cfg{1, 1, 0};
    SneNetwork big_state;
    big_state.layers.emplace_back(96, 96, 1, 8, cfg); // 73728 > 65536 bytes
    const auto r1 = sne::check_memory_budget(big_state);
    CHECK(r1.state_bytes == 73728);
    CHECK_FALSE(r1.fits);
    EventStream one = {{0, 0, 0, 0}};
    CHECK_THROWS_AS(sne::run_stream(big_state, one), MemoryBudgetExceeded);

    SneNetwork big_weights;
    big_weights.layers.emplace_back(2, 2, 46, 45, cfg); // 18630 > 18400 entries
    const auto r2 = sne::check_memory_budget(big_weights);
    CHECK(r2.weight_entries == 18630);
    CHECK_FALSE(r2.fits);

    SneNetwork ok;
    ok.layers.emplace_back(8, 8, 2, 4, cfg);
    const auto r3 = sne::check_memory_budget(ok);
    CHECK(r3.state_bytes == 8 * 8 * 4);
    CHECK(r3.weight_entries == 2 * 4 * 9);
    CHECK(r3.fits);
}

TEST_CASE("run_stream rejects unsorted streams")
{
    LifConfig cfg{1, 1, 0};
    SneNetwork net;
    net.layers.emplace_back(2, 2, 1, 1, cfg);
    EventStream events = {{5, 0, 0, 0}, {1, 0, 0, 0}};
    CHECK_FALSE(sne::is_tick_sorted(events));
    CHECK_THROWS_AS(sne::run_stream(net, events), UnsortedStream);
}

TEST_CASE("config and layer validation")
{
    CHECK_THROWS_AS((LifConfig{0, 1, 0}).validate(), SchemaViolation);
    CHECK_THROWS_AS((LifConfig{1, 1, 9}).validate(), SchemaViolation);
    CHECK_THROWS_AS((LifConfig{1, 3, 1}).validate(), SchemaViolation);
    CHECK_NOTHROW((LifConfig{1, 2, 1}).validate());

    LifConfig cfg{1, 1, 0};
    SneNetwork bad_chain;
    bad_chain.layers.emplace_back(4, 4, 1, 2, cfg);
    bad_chain.layers.emplace_back(4, 4, 3, 2, cfg);
    CHECK_THROWS_AS(bad_chain.validate(), SchemaViolation);

    LifLayer layer(2, 2, 1, 1, cfg);
    layer.weights[0] = -9;
    CHECK_THROWS_AS(layer.validate(), SchemaViolation);
}

TEST_CASE("stream_activity")
{
    const EventStream events = {{0, 0, 0, 0}, {1, 1, 1, 0}};
    CHECK(sne::stream_activity(events, 2, 2, 1) == doctest::Approx(0.25));
    CHECK(sne::stream_activity({}, 2, 2, 1) == 0.0);
}

TEST_SUITE_END();
