#include "kraken/calibration.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kraken/errors.hpp"

namespace kraken::calibration {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json point_to_json(const energy::EnginePowerPoint &p)
{
    ordered_json j;
    j["engine"] = std::string(energy::engine_name(p.engine));
    j["voltage_v"] = p.voltage_v;
    j["freq_hz"] = p.freq_hz;
    j["power_w"] = p.power_w;
    return j;
}

energy::EnginePowerPoint point_from_json(const json &j, const char *name)
{
    if (!j.is_object())
    {
        throw SchemaViolation(std::string("calibration: '") + name +
                "' is not an object");
    }
    energy::EnginePowerPoint p;
    p.engine = energy::engine_from_name(j.value("engine", std::string("sne")));
    p.voltage_v = j.value("voltage_v", 0.8);
    p.freq_hz = j.value("freq_hz", 0.0);
    p.power_w = j.value("power_w", 0.0);
    return p;
}

double get_num(const json &j, const char *key, double fallback)
{
    if (!j.contains(key))
    {
        return fallback;
    }
    if (!j[key].is_number())
    {
        throw SchemaViolation(std::string("calibration: '") + key +
                "' is not a number");
    }
    return j[key].get<double>();
}

} // namespace

void Calibration::validate() const
{
    sne_point.validate();
    cutie_point.validate();
    pulp_point.validate();
    cluster.validate();
    reference_patch.validate();
    if (sne_model.k_inf_activity <= 0.0 || sne_model.f_ref_hz <= 0.0)
    {
        throw SchemaViolation("calibration: throughput model constants must be positive");
    }
    if (cutie_overhead_cycles_per_layer < 0.0)
    {
        throw SchemaViolation("calibration: layer overhead cannot be negative");
    }
    if (cutie_peak_power_w <= 0.0)
    {
        throw SchemaViolation("calibration: peak power must be positive");
    }
    if (dronet_macs == 0)
    {
        throw SchemaViolation("calibration: dronet MAC budget must be positive");
    }
}

Calibration default_calibration()
{
    Calibration cal;
    cal.sne_point = {energy::Engine::Sne, 0.8, 222e6, 0.098};
    cal.cutie_point = {energy::Engine::Cutie, 0.8, 330e6, 0.110};
    cal.pulp_point = {energy::Engine::Pulp, 0.8, 330e6, 0.080};
    cal.sne_model = {208.0, 222e6};
    cal.cutie_overhead_cycles_per_layer = 0.0;
    cal.cutie_peak_power_w = 0.05284;
    cal.cluster.cores = 8;
    // One-time fit: MAC-LD vs baseline ratio on the reference patch = 1.66.
    cal.cluster.overhead_cycles_per_output = 1224.0 / 33.0;
    cal.cluster.utilization_cap = 0.98;
    cal.reference_patch = {256, 32, 64, 3, 8, 8};
    cal.dronet_macs = 369600000;
    cal.cluster_efficiency_op_s_w = {{"int8", 1.8e12}};

    auto ref = [](const std::string &workload) {
        report::ReportRow row;
        row.engine = "reference";
        row.workload = workload;
        return row;
    };
    cal.reference_rows.push_back(ref("Tianjic (multi-paradigm SoC)"));
    cal.reference_rows.push_back(ref("Vega (IoT end-node SoC)"));
    cal.reference_rows.push_back(ref("Moons2018 (BinarEye)"));
    return cal;
}

std::string calibration_to_json(const Calibration &cal)
{
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["power_points"]["sne"] = point_to_json(cal.sne_point);
    doc["power_points"]["cutie"] = point_to_json(cal.cutie_point);
    doc["power_points"]["pulp"] = point_to_json(cal.pulp_point);
    doc["sne_model"]["k_inf_activity"] = cal.sne_model.k_inf_activity;
    doc["sne_model"]["f_ref_hz"] = cal.sne_model.f_ref_hz;
    doc["cutie"]["overhead_cycles_per_layer"] = cal.cutie_overhead_cycles_per_layer;
    doc["cutie"]["peak_power_w"] = cal.cutie_peak_power_w;
    doc["cluster"]["cores"] = cal.cluster.cores;
    doc["cluster"]["overhead_cycles_per_output"] = cal.cluster.overhead_cycles_per_output;
    doc["cluster"]["utilization_cap"] = cal.cluster.utilization_cap;
    doc["reference_patch"]["n_out"] = cal.reference_patch.n_out;
    doc["reference_patch"]["c_in"] = cal.reference_patch.c_in;
    doc["reference_patch"]["c_out"] = cal.reference_patch.c_out;
    doc["reference_patch"]["k"] = cal.reference_patch.k;
    doc["reference_patch"]["a_bits"] = cal.reference_patch.a_bits;
    doc["reference_patch"]["w_bits"] = cal.reference_patch.w_bits;
    doc["dronet_macs"] = cal.dronet_macs;
    ordered_json eff;
    for (const auto &[key, v] : cal.cluster_efficiency_op_s_w)
    {
        eff[key] = v;
    }
    doc["cluster_efficiency_op_s_w"] = eff;
    doc["reference_rows"] = ordered_json::array();
    for (const auto &row : cal.reference_rows)
    {
        ordered_json j;
        j["engine"] = row.engine;
        j["workload"] = row.workload;
        doc["reference_rows"].push_back(j);
    }
    return doc.dump(2) + "\n";
}

Calibration calibration_from_json(const std::string &text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError(std::string("calibration: ") + e.what());
    }
    if (!doc.is_object())
    {
        throw SchemaViolation("calibration: top level is not an object");
    }
    if (doc.value("schema_version", 0) != 1)
    {
        throw SchemaViolation("calibration: unsupported schema_version");
    }

    Calibration cal = default_calibration();
    if (doc.contains("power_points"))
    {
        const auto &pp = doc["power_points"];
        if (!pp.is_object())
        {
            throw SchemaViolation("calibration: 'power_points' is not an object");
        }
        if (pp.contains("sne"))
        {
            cal.sne_point = point_from_json(pp["sne"], "sne");
        }
        if (pp.contains("cutie"))
        {
            cal.cutie_point = point_from_json(pp["cutie"], "cutie");
        }
        if (pp.contains("pulp"))
        {
            cal.pulp_point = point_from_json(pp["pulp"], "pulp");
        }
    }
    if (doc.contains("sne_model"))
    {
        const auto &m = doc["sne_model"];
        cal.sne_model.k_inf_activity =
                get_num(m, "k_inf_activity", cal.sne_model.k_inf_activity);
        cal.sne_model.f_ref_hz = get_num(m, "f_ref_hz", cal.sne_model.f_ref_hz);
    }
    if (doc.contains("cutie"))
    {
        const auto &c = doc["cutie"];
        cal.cutie_overhead_cycles_per_layer = get_num(c,
                "overhead_cycles_per_layer", cal.cutie_overhead_cycles_per_layer);
        cal.cutie_peak_power_w = get_num(c, "peak_power_w", cal.cutie_peak_power_w);
    }
    if (doc.contains("cluster"))
    {
        const auto &c = doc["cluster"];
        cal.cluster.cores = static_cast<int>(get_num(c, "cores", cal.cluster.cores));
        cal.cluster.overhead_cycles_per_output = get_num(c,
                "overhead_cycles_per_output", cal.cluster.overhead_cycles_per_output);
        cal.cluster.utilization_cap = get_num(c, "utilization_cap",
                cal.cluster.utilization_cap);
    }
    if (doc.contains("reference_patch"))
    {
        const auto &p = doc["reference_patch"];
        auto &r = cal.reference_patch;
        r.n_out = static_cast<std::uint32_t>(get_num(p, "n_out", r.n_out));
        r.c_in = static_cast<std::uint32_t>(get_num(p, "c_in", r.c_in));
        r.c_out = static_cast<std::uint32_t>(get_num(p, "c_out", r.c_out));
        r.k = static_cast<std::uint32_t>(get_num(p, "k", r.k));
        r.a_bits = static_cast<int>(get_num(p, "a_bits", r.a_bits));
        r.w_bits = static_cast<int>(get_num(p, "w_bits", r.w_bits));
    }
    if (doc.contains("dronet_macs"))
    {
        cal.dronet_macs = static_cast<std::uint64_t>(
                get_num(doc, "dronet_macs", static_cast<double>(cal.dronet_macs)));
    }
    if (doc.contains("cluster_efficiency_op_s_w"))
    {
        const auto &eff = doc["cluster_efficiency_op_s_w"];
        if (!eff.is_object())
        {
            throw SchemaViolation(
                    "calibration: 'cluster_efficiency_op_s_w' is not an object");
        }
        cal.cluster_efficiency_op_s_w.clear();
        for (const auto &[key, v] : eff.items())
        {
            if (!v.is_number())
            {
                throw SchemaViolation("calibration: efficiency for '" + key +
                        "' is not a number");
            }
            cal.cluster_efficiency_op_s_w[key] = v.get<double>();
        }
    }
    if (doc.contains("reference_rows"))
    {
        if (!doc["reference_rows"].is_array())
        {
            throw SchemaViolation("calibration: 'reference_rows' is not an array");
        }
        cal.reference_rows.clear();
        for (const auto &j : doc["reference_rows"])
        {
            report::ReportRow row;
            row.engine = j.value("engine", std::string("reference"));
            row.workload = j.value("workload", std::string());
            cal.reference_rows.push_back(std::move(row));
        }
    }
    cal.validate();
    return cal;
}

void save_calibration(const std::string &path, const Calibration &cal)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    out << calibration_to_json(cal);
    if (!out)
    {
        throw ParseError("write to '" + path + "' failed");
    }
}

Calibration load_calibration(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParseError("cannot open calibration file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return calibration_from_json(buf.str());
}

Calibration resolve_calibration(const std::string &explicit_path)
{
    if (!explicit_path.empty())
    {
        return load_calibration(explicit_path);
    }
    if (const char *env = std::getenv("KRAKEN_SIM_CONFIG"); env && *env)
    {
        return load_calibration(env);
    }
    return default_calibration();
}

} // namespace kraken::calibration
