#ifndef KRAKEN_ENERGY_HPP
#define KRAKEN_ENERGY_HPP

#include <string_view>
#include <vector>

namespace kraken::energy {

enum class Engine {
    Sne,
    Cutie,
    Pulp,
};

std::string_view engine_name(Engine e);
Engine engine_from_name(std::string_view name);

// One measured operating point of an engine.
struct EnginePowerPoint {
    Engine engine = Engine::Sne;
    double voltage_v = 0.8;
    double freq_hz = 0.0;
    double power_w = 0.0;

    // 0.5-0.8 V supply, 2-300 mW, up to 330 MHz.
    void validate() const;
};

// Hyperbolic event-proportional throughput: inf/s = (f/f_ref) * k / activity.
// k is calibrated so 1% activity at the reference frequency gives 20800.
struct SneThroughputModel {
    double k_inf_activity = 208.0;
    double f_ref_hz = 222e6;
};

double sne_throughput(double activity, double freq_hz,
        const SneThroughputModel &model);

// power / throughput; for the SNE model this is linear in activity.
double energy_per_inference(const EnginePowerPoint &point, double throughput);

// (ops * freq / cycles) / power, in Op/s/W.
double efficiency(double ops, double cycles, const EnginePowerPoint &point);

struct SweepRow {
    double activity = 0.0;
    double inf_per_s = 0.0;
    double energy_j = 0.0;
};

// Throughput/energy rows over [lo, hi] in steps of `step`; the inf/s column
// is monotone decreasing and the energy column monotone increasing.
std::vector<SweepRow> activity_sweep(double lo, double hi, double step,
        double freq_hz, const EnginePowerPoint &point,
        const SneThroughputModel &model);

} // namespace kraken::energy

#endif
