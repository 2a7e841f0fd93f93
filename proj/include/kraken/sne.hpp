#ifndef KRAKEN_SNE_HPP
#define KRAKEN_SNE_HPP

#include <cstdint>
#include <vector>

namespace kraken::sne {

// One COO record flowing through the network. For DVS input streams the
// sensor polarity is folded into the channel index by the loaders.
struct Event {
    std::uint32_t tick = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::uint16_t c = 0;

    friend bool operator==(const Event &, const Event &) = default;
};

using EventStream = std::vector<Event>;

bool is_tick_sorted(const EventStream &events);

// Integer LIF neuron parameters. The per-tick decay is
//   V <- trunc(V * leak_num / 2^leak_shift)
// with truncation toward zero, so it is not an arithmetic right shift for
// negative membranes.
struct LifConfig {
    std::int8_t threshold = 1;
    std::uint8_t leak_num = 1;
    std::uint8_t leak_shift = 0;

    // threshold >= 1, leak_shift <= 8, leak_num <= 2^leak_shift.
    void validate() const;
};

// Applies the per-tick decay recurrence exactly dt times. Bit-identical to
// dt sequential applications.
std::int8_t lif_decay(std::int8_t v, std::uint32_t dt, const LifConfig &cfg);

// One spiking conv layer: 4-bit signed 3x3 kernels, 8-bit membranes with
// lazy decay, fire check at end of tick over the touched set.
struct LifLayer {
    std::uint16_t height = 0;
    std::uint16_t width = 0;
    std::uint16_t c_in = 0;
    std::uint16_t c_out = 0;
    LifConfig config;
    // (c_out, c_in, ky, kx) row-major, values in [-8, 7].
    std::vector<std::int8_t> weights;

    // Per-neuron state, flat index (y * width + x) * c_out + c.
    std::vector<std::int8_t> membrane;
    std::vector<std::uint32_t> last_seen;

    // Per-run counters, reset together with the state.
    std::uint64_t spike_count = 0;
    std::uint64_t sop_count = 0;

    LifLayer() = default;
    LifLayer(std::uint16_t h, std::uint16_t w, std::uint16_t cin,
            std::uint16_t cout, const LifConfig &cfg);

    void validate() const;
    void reset_state();

    std::size_t neuron_count() const
    {
        return static_cast<std::size_t>(height) * width * c_out;
    }

    std::size_t weight_count() const { return weights.size(); }

    std::size_t neuron_index(std::uint32_t x, std::uint32_t y, std::uint32_t c) const
    {
        return (static_cast<std::size_t>(y) * width + x) * c_out + c;
    }

    std::int8_t weight(std::uint32_t co, std::uint32_t ci, std::uint32_t ky,
            std::uint32_t kx) const
    {
        return weights[((static_cast<std::size_t>(co) * c_in + ci) * 3 + ky) * 3 + kx];
    }

    std::int8_t &weight(std::uint32_t co, std::uint32_t ci, std::uint32_t ky,
            std::uint32_t kx)
    {
        return weights[((static_cast<std::size_t>(co) * c_in + ci) * 3 + ky) * 3 + kx];
    }

    // Scatters one input event into the 3x3 x c_out neighborhood: each
    // in-bounds target first decays lazily to e.tick, then saturating-adds
    // weight(c, e.c, dy+1, dx+1). Returns the touched flat indices and adds
    // one SOP per touched target. Throws OutOfBounds for bad coordinates.
    std::vector<std::uint32_t> inject_event(const Event &e);

    // Fires every touched neuron with V >= threshold, resets it to zero and
    // returns the emitted events sorted by (c, y, x).
    std::vector<Event> end_of_tick(std::uint32_t tick);

private:
    std::vector<std::uint8_t> touched_mark_;
    std::vector<std::uint32_t> touched_list_;
};

// On-chip budgets: eight 8 KiB state memories and a 9.2 kB weight buffer
// holding 4-bit entries.
inline constexpr std::uint64_t kStateBudgetBytes = 8 * 8192;
inline constexpr std::uint64_t kWeightBudgetEntries = 18400;

struct SneNetwork {
    std::vector<LifLayer> layers;

    // Dimension chaining and per-layer checks; memory budgets are reported
    // by check_memory_budget and enforced by run_stream.
    void validate() const;
    void reset_state();
};

struct MemoryReport {
    std::uint64_t state_bytes = 0;
    std::uint64_t weight_entries = 0;
    bool fits = false;
};

MemoryReport check_memory_budget(const SneNetwork &net);

struct SneStats {
    std::uint64_t events_in = 0;
    std::uint64_t events_out = 0;
    std::uint64_t sop_count = 0;
    std::uint32_t first_tick = 0;
    std::uint32_t last_tick = 0;
    // Tick span of the input stream, last - first + 1 (0 when empty).
    std::uint64_t ticks_observed = 0;
    std::vector<std::uint64_t> spikes_per_layer;
    // spikes / (neurons * ticks_observed) per layer.
    std::vector<double> activity_per_layer;
    // events_in / (input sites * ticks_observed).
    double input_activity = 0.0;
};

struct RunResult {
    EventStream events;
    SneStats stats;
};

// Event-driven run: ticks ascending, layer l's end-of-tick emissions are
// delivered to layer l+1 within the same tick. Resets the network state on
// entry and leaves the final membranes (decayed to the last tick) in `net`.
RunResult run_stream(SneNetwork &net, const EventStream &events);

// Time-stepped verification path: per tick decay everything once, then
// accumulate, compare, fire. Must match run_stream bit for bit, including
// final membranes and SOP counts.
RunResult dense_reference(SneNetwork &net, const EventStream &events);

// Fraction of (x, y, c) sites producing an event per tick of the span.
double stream_activity(const EventStream &events, std::uint32_t height,
        std::uint32_t width, std::uint32_t channels);

} // namespace kraken::sne

#endif
