#include "kraken/sne.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <tuple>

#include "kraken/errors.hpp"

namespace kraken::sne {

namespace {

std::int8_t saturating_add(std::int8_t v, std::int8_t w)
{
    const int sum = static_cast<int>(v) + static_cast<int>(w);
    return static_cast<std::int8_t>(std::clamp(sum, -128, 127));
}

std::int8_t decay_once(std::int8_t v, const LifConfig &cfg)
{
    // Integer division truncates toward zero; >> would round toward
    // -infinity for negative membranes.
    const int scaled = static_cast<int>(v) * static_cast<int>(cfg.leak_num);
    return static_cast<std::int8_t>(scaled / (1 << cfg.leak_shift));
}

} // namespace

bool is_tick_sorted(const EventStream &events)
{
    for (std::size_t i = 1; i < events.size(); i++)
    {
        if (events[i].tick < events[i - 1].tick)
        {
            return false;
        }
    }
    return true;
}

void LifConfig::validate() const
{
    if (threshold < 1)
    {
        throw SchemaViolation("LIF threshold must be >= 1, got " +
                std::to_string(threshold));
    }
    if (leak_shift > 8)
    {
        throw SchemaViolation("LIF leak shift must be <= 8, got " +
                std::to_string(leak_shift));
    }
    if (static_cast<int>(leak_num) > (1 << leak_shift))
    {
        throw SchemaViolation("LIF leak " + std::to_string(leak_num) + "/2^" +
                std::to_string(leak_shift) + " would amplify the membrane");
    }
}

std::int8_t lif_decay(std::int8_t v, std::uint32_t dt, const LifConfig &cfg)
{
    // Identity leak and the zero fixed point are exact under iteration, so
    // the shortcuts stay bit-identical to the honest loop.
    if (static_cast<int>(cfg.leak_num) == (1 << cfg.leak_shift))
    {
        return v;
    }
    for (std::uint32_t i = 0; i < dt && v != 0; i++)
    {
        v = decay_once(v, cfg);
    }
    return v;
}

LifLayer::LifLayer(std::uint16_t h, std::uint16_t w, std::uint16_t cin,
        std::uint16_t cout, const LifConfig &cfg)
        : height(h)
        , width(w)
        , c_in(cin)
        , c_out(cout)
        , config(cfg)
{
    weights.assign(static_cast<std::size_t>(cout) * cin * 9, 0);
    reset_state();
}

void LifLayer::validate() const
{
    if (height == 0 || width == 0 || c_in == 0 || c_out == 0)
    {
        throw InvalidDims("LIF layer has a zero dimension");
    }
    config.validate();
    if (weights.size() != static_cast<std::size_t>(c_out) * c_in * 9)
    {
        throw InvalidDims("LIF layer weight count " + std::to_string(weights.size()) +
                " does not match c_out*c_in*3*3 = " +
                std::to_string(static_cast<std::size_t>(c_out) * c_in * 9));
    }
    for (const std::int8_t w : weights)
    {
        if (w < -8 || w > 7)
        {
            throw SchemaViolation("LIF weight " + std::to_string(w) +
                    " outside the 4-bit range [-8, 7]");
        }
    }
}

void LifLayer::reset_state()
{
    membrane.assign(neuron_count(), 0);
    last_seen.assign(neuron_count(), 0);
    touched_mark_.assign(neuron_count(), 0);
    touched_list_.clear();
    spike_count = 0;
    sop_count = 0;
}

std::vector<std::uint32_t> LifLayer::inject_event(const Event &e)
{
    if (e.x >= width || e.y >= height || e.c >= c_in)
    {
        throw OutOfBounds("event (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                ",c" + std::to_string(e.c) + ") outside layer input dims " +
                std::to_string(width) + "x" + std::to_string(height) + "x" +
                std::to_string(c_in));
    }

    std::vector<std::uint32_t> touched;
    touched.reserve(static_cast<std::size_t>(c_out) * 9);
    for (std::uint32_t co = 0; co < c_out; co++)
    {
        for (int dy = -1; dy <= 1; dy++)
        {
            const int ny = static_cast<int>(e.y) + dy;
            if (ny < 0 || ny >= height)
            {
                continue;
            }
            for (int dx = -1; dx <= 1; dx++)
            {
                const int nx = static_cast<int>(e.x) + dx;
                if (nx < 0 || nx >= width)
                {
                    continue;
                }
                const std::size_t idx = neuron_index(
                        static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny), co);
                assert(last_seen[idx] <= e.tick);
                if (last_seen[idx] < e.tick)
                {
                    membrane[idx] = lif_decay(membrane[idx], e.tick - last_seen[idx], config);
                    last_seen[idx] = e.tick;
                }
                membrane[idx] = saturating_add(membrane[idx],
                        weight(co, e.c, static_cast<std::uint32_t>(dy + 1),
                                static_cast<std::uint32_t>(dx + 1)));
                sop_count++;
                if (!touched_mark_[idx])
                {
                    touched_mark_[idx] = 1;
                    touched_list_.push_back(static_cast<std::uint32_t>(idx));
                }
                touched.push_back(static_cast<std::uint32_t>(idx));
            }
        }
    }
    return touched;
}

std::vector<Event> LifLayer::end_of_tick(std::uint32_t tick)
{
    std::vector<Event> fired;
    for (const std::uint32_t idx : touched_list_)
    {
        touched_mark_[idx] = 0;
        if (membrane[idx] >= config.threshold)
        {
            const std::uint32_t c = idx % c_out;
            const std::uint32_t pixel = idx / c_out;
            fired.push_back(Event{tick, static_cast<std::uint16_t>(pixel % width),
                    static_cast<std::uint16_t>(pixel / width),
                    static_cast<std::uint16_t>(c)});
            membrane[idx] = 0;
        }
    }
    touched_list_.clear();
    std::sort(fired.begin(), fired.end(), [](const Event &a, const Event &b) {
        return std::tie(a.c, a.y, a.x) < std::tie(b.c, b.y, b.x);
    });
    spike_count += fired.size();
    return fired;
}

void SneNetwork::validate() const
{
    for (std::size_t l = 0; l < layers.size(); l++)
    {
        layers[l].validate();
        if (l + 1 < layers.size())
        {
            const LifLayer &cur = layers[l];
            const LifLayer &next = layers[l + 1];
            if (cur.height != next.height || cur.width != next.width ||
                    cur.c_out != next.c_in)
            {
                throw SchemaViolation("layer " + std::to_string(l) + " output dims " +
                        std::to_string(cur.width) + "x" + std::to_string(cur.height) +
                        "x" + std::to_string(cur.c_out) + " do not chain into layer " +
                        std::to_string(l + 1));
            }
        }
    }
}

void SneNetwork::reset_state()
{
    for (LifLayer &layer : layers)
    {
        layer.reset_state();
    }
}

MemoryReport check_memory_budget(const SneNetwork &net)
{
    MemoryReport report;
    for (const LifLayer &layer : net.layers)
    {
        report.state_bytes += layer.neuron_count();
        report.weight_entries += layer.weight_count();
    }
    report.fits = report.state_bytes <= kStateBudgetBytes &&
            report.weight_entries <= kWeightBudgetEntries;
    return report;
}

namespace {

void require_runnable(const SneNetwork &net, const EventStream &events)
{
    net.validate();
    const MemoryReport mem = check_memory_budget(net);
    if (!mem.fits)
    {
        throw MemoryBudgetExceeded("network needs " + std::to_string(mem.state_bytes) +
                " state bytes (budget " + std::to_string(kStateBudgetBytes) + ") and " +
                std::to_string(mem.weight_entries) + " weight entries (budget " +
                std::to_string(kWeightBudgetEntries) + ")");
    }
    if (!is_tick_sorted(events))
    {
        throw UnsortedStream("input events are not sorted by tick");
    }
}

void finish_stats(const SneNetwork &net, const EventStream &events,
        SneStats &stats)
{
    stats.events_in = events.size();
    if (!events.empty())
    {
        stats.first_tick = events.front().tick;
        stats.last_tick = events.back().tick;
        stats.ticks_observed =
                static_cast<std::uint64_t>(stats.last_tick) - stats.first_tick + 1;
    }
    for (const LifLayer &layer : net.layers)
    {
        stats.spikes_per_layer.push_back(layer.spike_count);
        stats.sop_count += layer.sop_count;
        const double sites = static_cast<double>(layer.neuron_count()) *
                static_cast<double>(stats.ticks_observed);
        stats.activity_per_layer.push_back(
                sites > 0 ? static_cast<double>(layer.spike_count) / sites : 0.0);
    }
    if (!net.layers.empty() && stats.ticks_observed > 0)
    {
        const LifLayer &in = net.layers.front();
        const double sites = static_cast<double>(in.height) * in.width * in.c_in *
                static_cast<double>(stats.ticks_observed);
        stats.input_activity = static_cast<double>(stats.events_in) / sites;
    }
}

} // namespace

RunResult run_stream(SneNetwork &net, const EventStream &events)
{
    require_runnable(net, events);
    net.reset_state();

    RunResult result;
    if (net.layers.empty())
    {
        finish_stats(net, events, result.stats);
        return result;
    }
    std::size_t pos = 0;
    while (pos < events.size())
    {
        const std::uint32_t tick = events[pos].tick;
        while (pos < events.size() && events[pos].tick == tick)
        {
            net.layers.front().inject_event(events[pos]);
            pos++;
        }
        // Synchronous cascade: emissions reach the next layer in this tick.
        for (std::size_t l = 0; l < net.layers.size(); l++)
        {
            const std::vector<Event> fired = net.layers[l].end_of_tick(tick);
            if (l + 1 < net.layers.size())
            {
                for (const Event &e : fired)
                {
                    net.layers[l + 1].inject_event(e);
                }
            }
            else
            {
                result.events.insert(result.events.end(), fired.begin(), fired.end());
            }
        }
    }

    // Catch every neuron up to the last processed tick so the final
    // membranes are canonical.
    if (!events.empty())
    {
        const std::uint32_t end_tick = events.back().tick;
        for (LifLayer &layer : net.layers)
        {
            for (std::size_t i = 0; i < layer.neuron_count(); i++)
            {
                if (layer.last_seen[i] < end_tick)
                {
                    layer.membrane[i] = lif_decay(layer.membrane[i],
                            end_tick - layer.last_seen[i], layer.config);
                    layer.last_seen[i] = end_tick;
                }
            }
        }
    }

    finish_stats(net, events, result.stats);
    result.stats.events_out = result.events.size();
    return result;
}

RunResult dense_reference(SneNetwork &net, const EventStream &events)
{
    require_runnable(net, events);
    net.reset_state();

    RunResult result;
    if (events.empty() || net.layers.empty())
    {
        finish_stats(net, events, result.stats);
        return result;
    }

    const std::uint32_t first = events.front().tick;
    const std::uint32_t last = events.back().tick;
    std::size_t pos = 0;
    for (std::uint32_t tick = first;; tick++)
    {
        // Phase 1: one decay step for every neuron of every layer.
        for (LifLayer &layer : net.layers)
        {
            for (std::size_t i = 0; i < layer.neuron_count(); i++)
            {
                layer.membrane[i] = lif_decay(layer.membrane[i], 1, layer.config);
                layer.last_seen[i] = tick;
            }
        }

        // Phase 2: accumulate this tick's inputs in stream order, then
        // compare/fire layer by layer, feeding emissions forward.
        std::vector<Event> incoming;
        while (pos < events.size() && events[pos].tick == tick)
        {
            incoming.push_back(events[pos]);
            pos++;
        }
        for (std::size_t l = 0; l < net.layers.size(); l++)
        {
            LifLayer &layer = net.layers[l];
            for (const Event &e : incoming)
            {
                if (e.x >= layer.width || e.y >= layer.height || e.c >= layer.c_in)
                {
                    throw OutOfBounds("event outside layer " + std::to_string(l) +
                            " input dims");
                }
                for (std::uint32_t co = 0; co < layer.c_out; co++)
                {
                    for (int dy = -1; dy <= 1; dy++)
                    {
                        const int ny = static_cast<int>(e.y) + dy;
                        if (ny < 0 || ny >= layer.height)
                        {
                            continue;
                        }
                        for (int dx = -1; dx <= 1; dx++)
                        {
                            const int nx = static_cast<int>(e.x) + dx;
                            if (nx < 0 || nx >= layer.width)
                            {
                                continue;
                            }
                            const std::size_t idx = layer.neuron_index(
                                    static_cast<std::uint32_t>(nx),
                                    static_cast<std::uint32_t>(ny), co);
                            layer.membrane[idx] = saturating_add(layer.membrane[idx],
                                    layer.weight(co, e.c, static_cast<std::uint32_t>(dy + 1),
                                            static_cast<std::uint32_t>(dx + 1)));
                            layer.sop_count++;
                        }
                    }
                }
            }

            incoming.clear();
            for (std::uint32_t y = 0; y < layer.height; y++)
            {
                for (std::uint32_t x = 0; x < layer.width; x++)
                {
                    for (std::uint32_t c = 0; c < layer.c_out; c++)
                    {
                        const std::size_t idx = layer.neuron_index(x, y, c);
                        if (layer.membrane[idx] >= layer.config.threshold)
                        {
                            incoming.push_back(Event{tick, static_cast<std::uint16_t>(x),
                                    static_cast<std::uint16_t>(y),
                                    static_cast<std::uint16_t>(c)});
                            layer.membrane[idx] = 0;
                        }
                    }
                }
            }
            std::sort(incoming.begin(), incoming.end(),
                    [](const Event &a, const Event &b) {
                        return std::tie(a.c, a.y, a.x) < std::tie(b.c, b.y, b.x);
                    });
            layer.spike_count += incoming.size();
            if (l + 1 == net.layers.size())
            {
                result.events.insert(result.events.end(), incoming.begin(), incoming.end());
                incoming.clear();
            }
        }

        if (tick == last)
        {
            break;
        }
    }

    finish_stats(net, events, result.stats);
    result.stats.events_out = result.events.size();
    return result;
}

double stream_activity(const EventStream &events, std::uint32_t height,
        std::uint32_t width, std::uint32_t channels)
{
    if (events.empty())
    {
        return 0.0;
    }
    const std::uint64_t span =
            static_cast<std::uint64_t>(events.back().tick) - events.front().tick + 1;
    const double sites = static_cast<double>(height) * width * channels *
            static_cast<double>(span);
    return sites > 0 ? static_cast<double>(events.size()) / sites : 0.0;
}

} // namespace kraken::sne
