#include "kraken/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kraken/errors.hpp"

namespace kraken::report {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string cell(double value)
{
    if (std::isnan(value))
    {
        return "";
    }
    return format_double(value);
}

// Commas and quotes never appear in engine/workload names we generate, but
// merged reports may carry arbitrary labels.
std::string csv_escape(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
    {
        return s;
    }
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
        {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

ReportRow::ReportRow()
    : freq_hz(kNan)
    , power_w(kNan)
    , throughput_inf_s(kNan)
    , energy_j_inf(kNan)
    , efficiency_op_s_w(kNan)
{
}

std::string to_csv(const SimReport &report)
{
    std::string out = "engine,workload,freq_hz,power_w,throughput_inf_s,"
                      "energy_j_inf,efficiency_op_s_w\n";
    for (const auto &row : report.rows)
    {
        out += csv_escape(row.engine);
        out += ',';
        out += csv_escape(row.workload);
        out += ',';
        out += cell(row.freq_hz);
        out += ',';
        out += cell(row.power_w);
        out += ',';
        out += cell(row.throughput_inf_s);
        out += ',';
        out += cell(row.energy_j_inf);
        out += ',';
        out += cell(row.efficiency_op_s_w);
        out += '\n';
    }
    return out;
}

std::string to_json(const SimReport &report)
{
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto &row : report.rows)
    {
        nlohmann::ordered_json j;
        j["engine"] = row.engine;
        j["workload"] = row.workload;
        auto set = [&j](const char *key, double v) {
            if (!std::isnan(v))
            {
                j[key] = v;
            }
        };
        set("freq_hz", row.freq_hz);
        set("power_w", row.power_w);
        set("throughput_inf_s", row.throughput_inf_s);
        set("energy_j_inf", row.energy_j_inf);
        set("efficiency_op_s_w", row.efficiency_op_s_w);
        if (!row.extra.empty())
        {
            nlohmann::ordered_json e;
            for (const auto &[key, v] : row.extra)
            {
                e[key] = v;
            }
            j["extra"] = e;
        }
        doc["rows"].push_back(j);
    }
    return doc.dump(2) + "\n";
}

SimReport report_from_json(const std::string &text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ParseError(std::string("report: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
    {
        throw SchemaViolation("report: expected an object with a 'rows' array");
    }
    if (!doc.contains("schema_version") ||
            !doc["schema_version"].is_number_integer() ||
            doc["schema_version"].get<int>() != 1)
    {
        throw SchemaViolation("report: unsupported schema_version");
    }
    SimReport report;
    for (const auto &j : doc["rows"])
    {
        if (!j.is_object())
        {
            throw SchemaViolation("report: row is not an object");
        }
        ReportRow row;
        row.engine = j.value("engine", std::string());
        row.workload = j.value("workload", std::string());
        row.freq_hz = j.value("freq_hz", kNan);
        row.power_w = j.value("power_w", kNan);
        row.throughput_inf_s = j.value("throughput_inf_s", kNan);
        row.energy_j_inf = j.value("energy_j_inf", kNan);
        row.efficiency_op_s_w = j.value("efficiency_op_s_w", kNan);
        if (j.contains("extra"))
        {
            if (!j["extra"].is_object())
            {
                throw SchemaViolation("report: 'extra' is not an object");
            }
            for (const auto &[key, v] : j["extra"].items())
            {
                if (!v.is_number())
                {
                    throw SchemaViolation("report: extra field '" + key +
                            "' is not a number");
                }
                row.extra[key] = v.get<double>();
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_file(const std::string &path, const SimReport &report,
        bool json)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    out << (json ? to_json(report) : to_csv(report));
    if (!out)
    {
        throw ParseError("write to '" + path + "' failed");
    }
}

SimReport read_report_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParseError("cannot open report file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

} // namespace kraken::report
