#include "kraken/energy.hpp"

#include <cmath>
#include <string>

#include "kraken/errors.hpp"

namespace kraken::energy {

std::string_view engine_name(Engine e)
{
    switch (e)
    {
    case Engine::Sne:
        return "sne";
    case Engine::Cutie:
        return "cutie";
    case Engine::Pulp:
        return "pulp";
    }
    return "?";
}

Engine engine_from_name(std::string_view name)
{
    if (name == "sne")
    {
        return Engine::Sne;
    }
    if (name == "cutie")
    {
        return Engine::Cutie;
    }
    if (name == "pulp")
    {
        return Engine::Pulp;
    }
    throw SchemaViolation("unknown engine '" + std::string(name) + "'");
}

void EnginePowerPoint::validate() const
{
    if (voltage_v < 0.5 || voltage_v > 0.8)
    {
        throw SchemaViolation("supply voltage " + std::to_string(voltage_v) +
                " V outside the 0.5-0.8 V range");
    }
    if (power_w < 0.002 || power_w > 0.300)
    {
        throw SchemaViolation("power " + std::to_string(power_w) +
                " W outside the 2-300 mW range");
    }
    if (freq_hz <= 0.0 || freq_hz > 330e6)
    {
        throw SchemaViolation("frequency " + std::to_string(freq_hz) +
                " Hz outside (0, 330 MHz]");
    }
}

double sne_throughput(double activity, double freq_hz,
        const SneThroughputModel &model)
{
    if (activity <= 0.0)
    {
        throw DegenerateActivity("activity must be positive");
    }
    if (activity > 1.0)
    {
        throw InvalidRange("activity " + std::to_string(activity) + " exceeds 1");
    }
    if (freq_hz <= 0.0)
    {
        throw InvalidRange("frequency must be positive");
    }
    return (freq_hz / model.f_ref_hz) * model.k_inf_activity / activity;
}

double energy_per_inference(const EnginePowerPoint &point, double throughput)
{
    if (throughput <= 0.0)
    {
        throw DegenerateThroughput("throughput must be positive");
    }
    return point.power_w / throughput;
}

double efficiency(double ops, double cycles, const EnginePowerPoint &point)
{
    if (cycles <= 0.0)
    {
        throw DegenerateWorkload("cycle count must be positive");
    }
    if (point.power_w <= 0.0 || point.freq_hz <= 0.0)
    {
        throw DegenerateThroughput("power point must have positive power and frequency");
    }
    return (ops * point.freq_hz / cycles) / point.power_w;
}

std::vector<SweepRow> activity_sweep(double lo, double hi, double step,
        double freq_hz, const EnginePowerPoint &point,
        const SneThroughputModel &model)
{
    if (lo <= 0.0 || lo > hi || hi > 1.0 || step <= 0.0)
    {
        throw InvalidRange("activity sweep needs 0 < lo <= hi <= 1 and step > 0");
    }
    const auto count = static_cast<std::size_t>(
            std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<SweepRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; i++)
    {
        SweepRow row;
        row.activity = lo + static_cast<double>(i) * step;
        row.inf_per_s = sne_throughput(row.activity, freq_hz, model);
        row.energy_j = energy_per_inference(point, row.inf_per_s);
        rows.push_back(row);
    }
    return rows;
}

} // namespace kraken::energy
