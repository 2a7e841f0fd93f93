#ifndef KRAKEN_CALIBRATION_HPP
#define KRAKEN_CALIBRATION_HPP

#include <map>
#include <string>
#include <vector>

#include "kraken/energy.hpp"
#include "kraken/pulp.hpp"
#include "kraken/report.hpp"

namespace kraken::calibration {

// Every measured constant and model parameter the simulator uses, with the
// published silicon values as defaults. Serializable so alternative operating
// points can be swapped in without rebuilding.
struct Calibration {
    energy::EnginePowerPoint sne_point;
    energy::EnginePowerPoint cutie_point;
    energy::EnginePowerPoint pulp_point;

    energy::SneThroughputModel sne_model;

    // Per-layer pipeline overhead added to the CUTIE cycle count.
    double cutie_overhead_cycles_per_layer = 0.0;
    // Back-solved power at which the full datapath reaches the quoted
    // 1036 TOp/s/W; the measurement's operating point is not published.
    double cutie_peak_power_w = 0.05284;

    pulp::ClusterCycleModel cluster;
    // int8 3x3 layer patch used to calibrate the cluster overhead.
    pulp::ConvPatchSpec reference_patch;
    // MAC budget of the drone-navigation workload; chosen so the modeled
    // cluster rate at 330 MHz reproduces the measured 28 inf/s.
    std::uint64_t dronet_macs = 369600000;

    // Headline cluster efficiency per precision, Op/s/W.
    std::map<std::string, double> cluster_efficiency_op_s_w;

    // Labeled rows for other published chips, carried into merged reports
    // on request. Numbers we cannot source stay empty.
    std::vector<report::ReportRow> reference_rows;

    void validate() const;
};

Calibration default_calibration();

std::string calibration_to_json(const Calibration &cal);
Calibration calibration_from_json(const std::string &text);

void save_calibration(const std::string &path, const Calibration &cal);
Calibration load_calibration(const std::string &path);

// Resolution order: explicit path, then the KRAKEN_SIM_CONFIG environment
// variable, then built-in defaults.
Calibration resolve_calibration(const std::string &explicit_path);

} // namespace kraken::calibration

#endif
