#ifndef KRAKEN_REPORT_HPP
#define KRAKEN_REPORT_HPP

#include <map>
#include <string>
#include <vector>

namespace kraken::report {

// Shortest decimal string that parses back to the same double. Deterministic,
// so reports built from identical inputs are byte-identical.
std::string format_double(double value);

// One per-run result row. Unknown numeric fields stay NaN and are emitted as
// empty CSV cells, which is how labeled reference rows avoid invented numbers.
struct ReportRow {
    std::string engine;
    std::string workload;
    double freq_hz;
    double power_w;
    double throughput_inf_s;
    double energy_j_inf;
    double efficiency_op_s_w;
    // Extra per-run statistics (cycles, events, spikes, sops, activity).
    // Carried in the structured output only, never in the CSV columns.
    std::map<std::string, double> extra;

    ReportRow();
};

struct SimReport {
    std::vector<ReportRow> rows;
};

// Fixed column order: engine, workload, freq_hz, power_w, throughput_inf_s,
// energy_j_inf, efficiency_op_s_w.
std::string to_csv(const SimReport &report);

std::string to_json(const SimReport &report);

SimReport report_from_json(const std::string &text);

void write_report_file(const std::string &path, const SimReport &report,
        bool json);
SimReport read_report_file(const std::string &path);

} // namespace kraken::report

#endif
