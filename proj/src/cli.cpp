#include "kraken/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "kraken/calibration.hpp"
#include "kraken/codec.hpp"
#include "kraken/cutie.hpp"
#include "kraken/energy.hpp"
#include "kraken/errors.hpp"
#include "kraken/io.hpp"
#include "kraken/pulp.hpp"
#include "kraken/report.hpp"
#include "kraken/sne.hpp"

namespace kraken::cli {

namespace {

namespace fs = std::filesystem;

struct OutputOpts {
    std::string out_path; // empty: stdout
    bool json = false;
};

void emit_report(const report::SimReport &rep, const OutputOpts &out)
{
    const std::string text = out.json ? report::to_json(rep) : report::to_csv(rep);
    if (out.out_path.empty())
    {
        std::fputs(text.c_str(), stdout);
    }
    else
    {
        io::write_file_text(out.out_path, text);
    }
}

double pick_freq(double requested, double table_freq)
{
    const double freq = requested > 0.0 ? requested : table_freq;
    if (freq <= 0.0 || freq > 330e6)
    {
        throw InvalidRange("frequency " + report::format_double(freq) +
                " Hz outside (0, 330 MHz]");
    }
    return freq;
}

energy::EnginePowerPoint point_at(const energy::EnginePowerPoint &table,
        double freq)
{
    energy::EnginePowerPoint p = table;
    p.freq_hz = freq;
    return p;
}

std::string workload_name(const std::string &name, const std::string &path)
{
    return name.empty() ? fs::path(path).stem().string() : name;
}

double parse_double_strict(std::string_view s, const char *what)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    {
        throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    return value;
}

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

SweepRange parse_sweep_range(const std::string &s)
{
    const std::size_t first = s.find(':');
    const std::size_t second = first == std::string::npos
            ? std::string::npos
            : s.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
            s.find(':', second + 1) != std::string::npos)
    {
        throw ParseError("activity range must be 'lo:hi:step', got '" + s + "'");
    }
    SweepRange r;
    r.lo = parse_double_strict(std::string_view(s).substr(0, first), "range start");
    r.hi = parse_double_strict(
            std::string_view(s).substr(first + 1, second - first - 1), "range end");
    r.step = parse_double_strict(std::string_view(s).substr(second + 1), "range step");
    return r;
}

io::EventFormat event_format_from_string(const std::string &s)
{
    if (s == "auto")
    {
        return io::EventFormat::Auto;
    }
    if (s == "csv")
    {
        return io::EventFormat::Csv;
    }
    return io::EventFormat::Kev1;
}

// ---- sne run ----

struct SneRunOpts {
    std::string net_path;
    std::string events_path;
    std::string format = "auto";
    std::string events_out;
    bool sort = false;
    bool oracle = false;
    double freq = 0.0;
    OutputOpts out;
};

void check_oracle(const sne::SneNetwork &base, const sne::EventStream &events,
        const sne::RunResult &got)
{
    sne::SneNetwork event_net = base;
    sne::SneNetwork dense_net = base;
    const sne::RunResult lhs = sne::run_stream(event_net, events);
    const sne::RunResult rhs = sne::dense_reference(dense_net, events);
    if (lhs.events != got.events)
    {
        throw OracleMismatch("oracle rerun is not reproducible");
    }
    if (lhs.events != rhs.events)
    {
        throw OracleMismatch("event-driven spike train diverges from the dense "
                "reference (" + std::to_string(lhs.events.size()) + " vs " +
                std::to_string(rhs.events.size()) + " events)");
    }
    if (lhs.stats.sop_count != rhs.stats.sop_count)
    {
        throw OracleMismatch("SOP count diverges: event-driven " +
                std::to_string(lhs.stats.sop_count) + ", dense " +
                std::to_string(rhs.stats.sop_count));
    }
    for (std::size_t l = 0; l < event_net.layers.size(); l++)
    {
        if (event_net.layers[l].membrane != dense_net.layers[l].membrane)
        {
            throw OracleMismatch("final membranes diverge in layer " +
                    std::to_string(l));
        }
        if (event_net.layers[l].spike_count != dense_net.layers[l].spike_count)
        {
            throw OracleMismatch("spike counts diverge in layer " +
                    std::to_string(l));
        }
    }
}

void cmd_sne_run(const SneRunOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    const auto loaded = io::load_network(o.net_path);
    const auto *net = std::get_if<sne::SneNetwork>(&loaded.net);
    if (net == nullptr)
    {
        throw SchemaViolation("'" + o.net_path + "' describes a '" +
                loaded.engine + "' workload, expected 'sne'");
    }
    const auto events = io::load_events(o.events_path,
            event_format_from_string(o.format), o.sort);

    sne::SneNetwork run_net = *net;
    const sne::RunResult result = sne::run_stream(run_net, events);
    if (o.oracle)
    {
        check_oracle(*net, events, result);
    }
    if (!o.events_out.empty())
    {
        io::save_events(o.events_out, result.events);
    }

    const double freq = pick_freq(o.freq, cal.sne_point.freq_hz);
    report::ReportRow row;
    row.engine = "sne";
    row.workload = workload_name(loaded.name, o.net_path);
    row.freq_hz = freq;
    row.power_w = cal.sne_point.power_w;
    const double activity = result.stats.input_activity;
    if (activity > 0.0 && activity <= 1.0)
    {
        row.throughput_inf_s = energy::sne_throughput(activity, freq, cal.sne_model);
        row.energy_j_inf =
                energy::energy_per_inference(cal.sne_point, row.throughput_inf_s);
        // SOP/s/W: synaptic updates of this stream at the modeled rate.
        row.efficiency_op_s_w = static_cast<double>(result.stats.sop_count) *
                row.throughput_inf_s / cal.sne_point.power_w;
    }
    row.extra["activity"] = activity;
    row.extra["events_in"] = static_cast<double>(result.stats.events_in);
    row.extra["events_out"] = static_cast<double>(result.stats.events_out);
    row.extra["sops"] = static_cast<double>(result.stats.sop_count);
    row.extra["ticks"] = static_cast<double>(result.stats.ticks_observed);
    for (std::size_t l = 0; l < result.stats.spikes_per_layer.size(); l++)
    {
        row.extra["spikes_l" + std::to_string(l)] =
                static_cast<double>(result.stats.spikes_per_layer[l]);
    }

    report::SimReport rep;
    rep.rows.push_back(std::move(row));
    emit_report(rep, o.out);
}

// ---- sne sweep ----

struct SneSweepOpts {
    std::string range = "0.01:0.20:0.01";
    double freq = 0.0;
    OutputOpts out;
};

void cmd_sne_sweep(const SneSweepOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    const SweepRange r = parse_sweep_range(o.range);
    const double freq = pick_freq(o.freq, cal.sne_point.freq_hz);
    const auto rows =
            energy::activity_sweep(r.lo, r.hi, r.step, freq, cal.sne_point,
                    cal.sne_model);

    report::SimReport rep;
    for (const auto &s : rows)
    {
        report::ReportRow row;
        row.engine = "sne";
        row.workload = "alpha=" + report::format_double(s.activity);
        row.freq_hz = freq;
        row.power_w = cal.sne_point.power_w;
        row.throughput_inf_s = s.inf_per_s;
        row.energy_j_inf = s.energy_j;
        row.extra["activity"] = s.activity;
        rep.rows.push_back(std::move(row));
    }
    emit_report(rep, o.out);
}

// ---- cutie ----

struct CutieRunOpts {
    std::string net_path;
    std::string input_path;
    double freq = 0.0;
    OutputOpts out;
};

const cutie::CutieNetwork &as_cutie(const io::LoadedNetwork &loaded,
        const std::string &path)
{
    const auto *net = std::get_if<cutie::CutieNetwork>(&loaded.net);
    if (net == nullptr)
    {
        throw SchemaViolation("'" + path + "' describes a '" + loaded.engine +
                "' workload, expected 'cutie'");
    }
    return *net;
}

report::ReportRow cutie_row(const cutie::CutieNetwork &net,
        const calibration::Calibration &cal, double requested_freq,
        const std::string &workload)
{
    const double freq = pick_freq(requested_freq, cal.cutie_point.freq_hz);
    const double cycles =
            cutie::cutie_cycles(net, cal.cutie_overhead_cycles_per_layer);
    const auto point = point_at(cal.cutie_point, freq);
    const double ops = static_cast<double>(cutie::count_ops(net));
    const auto mem = cutie::cutie_memcheck(net);

    report::ReportRow row;
    row.engine = "cutie";
    row.workload = workload;
    row.freq_hz = freq;
    row.power_w = point.power_w;
    row.throughput_inf_s = freq / cycles;
    row.energy_j_inf =
            energy::energy_per_inference(point, row.throughput_inf_s);
    row.efficiency_op_s_w = energy::efficiency(ops, cycles, point);
    row.extra["cycles"] = cycles;
    row.extra["ops"] = ops;
    row.extra["weight_bytes"] = static_cast<double>(mem.weight_bytes);
    row.extra["fm_bytes"] = static_cast<double>(mem.fm_bytes);
    return row;
}

void cmd_cutie_run(const CutieRunOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    const auto loaded = io::load_network(o.net_path);
    const auto &net = as_cutie(loaded, o.net_path);
    const auto input = io::load_tensor(o.input_path);
    const auto fwd = cutie::cutie_forward(net, input);

    report::ReportRow row = cutie_row(net, cal, o.freq,
            workload_name(loaded.name, o.net_path));
    row.extra["label"] = static_cast<double>(fwd.argmax);

    report::SimReport rep;
    rep.rows.push_back(std::move(row));
    emit_report(rep, o.out);
}

struct CutieCyclesOpts {
    std::string net_path;
    double freq = 0.0;
    OutputOpts out;
};

void cmd_cutie_cycles(const CutieCyclesOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    const auto loaded = io::load_network(o.net_path);
    const auto &net = as_cutie(loaded, o.net_path);

    report::SimReport rep;
    rep.rows.push_back(cutie_row(net, cal, o.freq,
            workload_name(loaded.name, o.net_path)));
    emit_report(rep, o.out);
}

// ---- pulp ----

struct PulpOpts {
    std::string patch_path;
    bool dronet = false;
    bool baseline = false; // plain MAC inner loop, no MAC-LD
    int n_out = 0;
    int c_in = 0;
    int c_out = 0;
    int k = 3;
    int a_bits = 8;
    int w_bits = 8;
    double freq = 0.0;
    OutputOpts out;
};

void cmd_pulp_estimate(const PulpOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    const double freq = pick_freq(o.freq, cal.pulp_point.freq_hz);
    const auto point = point_at(cal.pulp_point, freq);

    report::ReportRow row;
    row.engine = "pulp";
    row.freq_hz = freq;
    row.power_w = point.power_w;

    if (o.dronet)
    {
        const double macs = static_cast<double>(cal.dronet_macs);
        const double rate = pulp::cluster_inference_rate(cal.dronet_macs,
                pulp::Precision::Int8, freq, cal.cluster);
        row.workload = "dronet";
        row.throughput_inf_s = rate;
        row.energy_j_inf = energy::energy_per_inference(point, rate);
        row.efficiency_op_s_w = energy::efficiency(2.0 * macs, freq / rate, point);
        row.extra["macs"] = macs;
    }
    else
    {
        pulp::ConvPatchSpec spec;
        std::string workload = "patch";
        if (!o.patch_path.empty())
        {
            const auto loaded = io::load_network(o.patch_path);
            const auto *p = std::get_if<pulp::ConvPatchSpec>(&loaded.net);
            if (p == nullptr)
            {
                throw SchemaViolation("'" + o.patch_path + "' describes a '" +
                        loaded.engine + "' workload, expected 'pulp-patch'");
            }
            spec = *p;
            workload = workload_name(loaded.name, o.patch_path);
        }
        else
        {
            if (o.n_out <= 0 || o.c_in <= 0 || o.c_out <= 0)
            {
                throw CLI::RequiredError("pulp estimate: pass --patch FILE, "
                        "--dronet, or all of --n-out/--c-in/--c-out");
            }
            spec.n_out = static_cast<std::uint32_t>(o.n_out);
            spec.c_in = static_cast<std::uint32_t>(o.c_in);
            spec.c_out = static_cast<std::uint32_t>(o.c_out);
            spec.k = static_cast<std::uint32_t>(o.k);
            spec.a_bits = o.a_bits;
            spec.w_bits = o.w_bits;
            spec.validate();
        }

        const auto timing = pulp::patch_cycles(spec, !o.baseline, cal.cluster);
        const double macs = static_cast<double>(spec.total_macs());
        row.workload = workload;
        row.throughput_inf_s = freq / timing.cycles;
        row.energy_j_inf =
                energy::energy_per_inference(point, row.throughput_inf_s);
        row.efficiency_op_s_w = energy::efficiency(2.0 * macs, timing.cycles, point);
        row.extra["cycles"] = timing.cycles;
        row.extra["macs"] = macs;
        row.extra["mac_steps"] = static_cast<double>(timing.mac_steps_total);
        row.extra["steps_per_cycle_per_core"] = timing.mac_steps_per_cycle_per_core;
        row.extra["macs_per_cycle_per_core"] = timing.macs_per_cycle_per_core;
    }

    report::SimReport rep;
    rep.rows.push_back(std::move(row));
    emit_report(rep, o.out);
}

// ---- codec ----

struct CodecOpts {
    std::string in_path;
    std::string out_path;
};

void cmd_codec_pack(const CodecOpts &o)
{
    const auto t = io::load_tensor(o.in_path);
    codec::write_ktt_file(t, o.out_path);
}

void cmd_codec_unpack(const CodecOpts &o)
{
    const auto t = codec::read_ktt_file(o.in_path);
    io::save_trit_text(o.out_path, t);
}

// ---- report ----

struct ReportOpts {
    std::vector<std::string> inputs;
    bool reference = false;
    OutputOpts out;
};

void cmd_report(const ReportOpts &o, const std::string &config)
{
    const auto cal = calibration::resolve_calibration(config);
    report::SimReport merged;
    for (const auto &path : o.inputs)
    {
        auto rep = report::read_report_file(path);
        for (auto &row : rep.rows)
        {
            merged.rows.push_back(std::move(row));
        }
    }
    if (o.reference)
    {
        for (const auto &row : cal.reference_rows)
        {
            merged.rows.push_back(row);
        }
    }
    emit_report(merged, o.out);
}

// ---- gen ----

struct GenOpts {
    std::uint64_t seed = 1;
    std::string prefix;
    // sne
    io::SneGenParams sne;
    // cutie
    std::string preset = "small";
};

void note_written(const std::string &path)
{
    std::fprintf(stdout, "wrote %s\n", path.c_str());
}

void cmd_gen_sne(const GenOpts &o)
{
    const auto g = io::gen_sne(o.sne, o.seed);
    const std::string stem = fs::path(o.prefix).filename().string();
    const std::string net_path = o.prefix + ".json";
    const std::string events_path = o.prefix + ".events.csv";
    io::save_sne_network(net_path, g.net, stem);
    io::save_events(events_path, g.events);
    note_written(net_path);
    note_written(events_path);
}

void cmd_gen_cutie(const GenOpts &o)
{
    const auto g = o.preset == "cifar10" ? io::gen_cutie_cifar10(o.seed)
                                         : io::gen_cutie_small(o.seed);
    const std::string stem = fs::path(o.prefix).filename().string();
    const std::string net_path = o.prefix + ".json";
    const std::string input_path = o.prefix + ".input.ktt";
    io::save_cutie_network(net_path, g.net, stem, false);
    codec::write_ktt_file(g.input, input_path);
    note_written(net_path);
    for (std::size_t l = 0; l < g.net.layers.size(); l++)
    {
        note_written(o.prefix + "_l" + std::to_string(l) + ".ktt");
    }
    note_written(input_path);
}

void cmd_gen_patch(const GenOpts &o)
{
    const auto spec = io::gen_patch(o.seed);
    const std::string stem = fs::path(o.prefix).filename().string();
    const std::string path = o.prefix + ".json";
    io::save_patch(path, spec, stem);
    note_written(path);
}

void cmd_gen_config(const std::string &path)
{
    calibration::save_calibration(path, calibration::default_calibration());
    note_written(path);
}

void add_output_opts(CLI::App *sub, OutputOpts &out)
{
    sub->add_option("--out", out.out_path, "write the report here instead of stdout");
    sub->add_flag("--json", out.json, "emit the report as structured text");
}

} // namespace

int cli_main(int argc, const char *const *argv)
{
    CLI::App app{"Kraken SoC compute-engine simulator"};
    app.require_subcommand(1);

    std::string config;
    app.add_option("--config", config,
            "calibration file (default: $KRAKEN_SIM_CONFIG, then built-ins)");

    // sne
    auto *sne_cmd = app.add_subcommand("sne", "event-driven spiking engine");
    sne_cmd->require_subcommand(1);
    sne_cmd->fallthrough();

    SneRunOpts sne_run;
    auto *sne_run_cmd = sne_cmd->add_subcommand("run", "run an event stream");
    sne_run_cmd->fallthrough();
    sne_run_cmd->add_option("--net", sne_run.net_path, "network description")
            ->required();
    sne_run_cmd->add_option("--events", sne_run.events_path, "event stream file")
            ->required();
    sne_run_cmd->add_option("--format", sne_run.format, "event file format")
            ->check(CLI::IsMember({"auto", "csv", "kev1"}));
    sne_run_cmd->add_flag("--sort", sne_run.sort, "sort unsorted events on load");
    sne_run_cmd->add_flag("--oracle", sne_run.oracle,
            "cross-check against the dense reference");
    sne_run_cmd->add_option("--events-out", sne_run.events_out,
            "write the output spike train here");
    sne_run_cmd->add_option("--freq", sne_run.freq, "clock in Hz");
    add_output_opts(sne_run_cmd, sne_run.out);
    sne_run_cmd->callback([&]() { cmd_sne_run(sne_run, config); });

    SneSweepOpts sne_sweep;
    auto *sne_sweep_cmd =
            sne_cmd->add_subcommand("sweep", "throughput/energy vs activity");
    sne_sweep_cmd->fallthrough();
    sne_sweep_cmd->add_option("--activity", sne_sweep.range,
            "activity range lo:hi:step");
    sne_sweep_cmd->add_option("--freq", sne_sweep.freq, "clock in Hz");
    add_output_opts(sne_sweep_cmd, sne_sweep.out);
    sne_sweep_cmd->callback([&]() { cmd_sne_sweep(sne_sweep, config); });

    // cutie
    auto *cutie_cmd = app.add_subcommand("cutie", "ternary conv engine");
    cutie_cmd->require_subcommand(1);
    cutie_cmd->fallthrough();

    CutieRunOpts cutie_run;
    auto *cutie_run_cmd = cutie_cmd->add_subcommand("run", "classify one input");
    cutie_run_cmd->fallthrough();
    cutie_run_cmd->add_option("--net", cutie_run.net_path, "network description")
            ->required();
    cutie_run_cmd->add_option("--input", cutie_run.input_path,
            "input tensor (.ktt, .pgm or .txt)")
            ->required();
    cutie_run_cmd->add_option("--freq", cutie_run.freq, "clock in Hz");
    add_output_opts(cutie_run_cmd, cutie_run.out);
    cutie_run_cmd->callback([&]() { cmd_cutie_run(cutie_run, config); });

    CutieCyclesOpts cutie_cycles;
    auto *cutie_cycles_cmd =
            cutie_cmd->add_subcommand("cycles", "cycle count and rate only");
    cutie_cycles_cmd->fallthrough();
    cutie_cycles_cmd->add_option("--net", cutie_cycles.net_path,
            "network description")
            ->required();
    cutie_cycles_cmd->add_option("--freq", cutie_cycles.freq, "clock in Hz");
    add_output_opts(cutie_cycles_cmd, cutie_cycles.out);
    cutie_cycles_cmd->callback([&]() { cmd_cutie_cycles(cutie_cycles, config); });

    // pulp
    auto *pulp_cmd = app.add_subcommand("pulp", "mixed-precision cluster model");
    pulp_cmd->require_subcommand(1);
    pulp_cmd->fallthrough();

    PulpOpts pulp;
    auto *pulp_est_cmd =
            pulp_cmd->add_subcommand("estimate", "cycle/throughput estimate");
    pulp_est_cmd->fallthrough();
    pulp_est_cmd->add_option("--patch", pulp.patch_path, "patch description file");
    pulp_est_cmd->add_flag("--dronet", pulp.dronet,
            "estimate the calibrated drone-navigation workload");
    pulp_est_cmd->add_flag("--baseline", pulp.baseline,
            "inner loop without MAC-LD overlap");
    pulp_est_cmd->add_option("--n-out", pulp.n_out, "output pixels");
    pulp_est_cmd->add_option("--c-in", pulp.c_in, "input channels");
    pulp_est_cmd->add_option("--c-out", pulp.c_out, "output channels");
    pulp_est_cmd->add_option("--k", pulp.k, "kernel size");
    pulp_est_cmd->add_option("--a-bits", pulp.a_bits, "activation bits (2/4/8)");
    pulp_est_cmd->add_option("--w-bits", pulp.w_bits, "weight bits (2/4/8)");
    pulp_est_cmd->add_option("--freq", pulp.freq, "clock in Hz");
    add_output_opts(pulp_est_cmd, pulp.out);
    pulp_est_cmd->callback([&]() { cmd_pulp_estimate(pulp, config); });

    // codec
    auto *codec_cmd = app.add_subcommand("codec", "trit packing");
    codec_cmd->require_subcommand(1);
    codec_cmd->fallthrough();

    CodecOpts codec_pack;
    auto *pack_cmd = codec_cmd->add_subcommand("pack", "tensor file to .ktt");
    pack_cmd->fallthrough();
    pack_cmd->add_option("--in", codec_pack.in_path, "input (.txt or .pgm)")
            ->required();
    pack_cmd->add_option("--out", codec_pack.out_path, "output .ktt")->required();
    pack_cmd->callback([&]() { cmd_codec_pack(codec_pack); });

    CodecOpts codec_unpack;
    auto *unpack_cmd = codec_cmd->add_subcommand("unpack", ".ktt to trit text");
    unpack_cmd->fallthrough();
    unpack_cmd->add_option("--in", codec_unpack.in_path, "input .ktt")->required();
    unpack_cmd->add_option("--out", codec_unpack.out_path, "output .txt")
            ->required();
    unpack_cmd->callback([&]() { cmd_codec_unpack(codec_unpack); });

    // report
    ReportOpts rep;
    auto *report_cmd = app.add_subcommand("report", "merge structured reports");
    report_cmd->fallthrough();
    report_cmd->add_option("--in", rep.inputs, "structured report files")
            ->expected(-1);
    report_cmd->add_flag("--reference", rep.reference,
            "append labeled reference rows from the calibration file");
    add_output_opts(report_cmd, rep.out);
    report_cmd->callback([&]() { cmd_report(rep, config); });

    // gen
    auto *gen_cmd = app.add_subcommand("gen", "deterministic synthetic workloads");
    gen_cmd->require_subcommand(1);
    gen_cmd->fallthrough();

    GenOpts gen_sne;
    auto *gen_sne_cmd = gen_cmd->add_subcommand("sne", "network + event stream");
    gen_sne_cmd->fallthrough();
    gen_sne_cmd->add_option("--seed", gen_sne.seed, "rng seed");
    gen_sne_cmd->add_option("--out", gen_sne.prefix, "output path prefix")
            ->required();
    gen_sne_cmd->add_option("--height", gen_sne.sne.height, "input height");
    gen_sne_cmd->add_option("--width", gen_sne.sne.width, "input width");
    gen_sne_cmd->add_option("--in-channels", gen_sne.sne.c_in, "input channels");
    gen_sne_cmd->add_option("--out-channels", gen_sne.sne.c_out,
            "channels per layer");
    gen_sne_cmd->add_option("--layers", gen_sne.sne.layers, "layer count");
    gen_sne_cmd->add_option("--ticks", gen_sne.sne.ticks, "stream length");
    gen_sne_cmd->add_option("--density", gen_sne.sne.density,
            "per-site event probability per tick");
    gen_sne_cmd->callback([&]() { cmd_gen_sne(gen_sne); });

    GenOpts gen_cutie;
    auto *gen_cutie_cmd = gen_cmd->add_subcommand("cutie", "network + input");
    gen_cutie_cmd->fallthrough();
    gen_cutie_cmd->add_option("--seed", gen_cutie.seed, "rng seed");
    gen_cutie_cmd->add_option("--out", gen_cutie.prefix, "output path prefix")
            ->required();
    gen_cutie_cmd->add_option("--preset", gen_cutie.preset, "topology preset")
            ->check(CLI::IsMember({"small", "cifar10"}));
    gen_cutie_cmd->callback([&]() { cmd_gen_cutie(gen_cutie); });

    GenOpts gen_patch;
    auto *gen_patch_cmd = gen_cmd->add_subcommand("patch", "cluster layer patch");
    gen_patch_cmd->fallthrough();
    gen_patch_cmd->add_option("--seed", gen_patch.seed, "rng seed");
    gen_patch_cmd->add_option("--out", gen_patch.prefix, "output path prefix")
            ->required();
    gen_patch_cmd->callback([&]() { cmd_gen_patch(gen_patch); });

    std::string gen_config_path;
    auto *gen_config_cmd = gen_cmd->add_subcommand("config",
            "built-in calibration as an editable file");
    gen_config_cmd->fallthrough();
    gen_config_cmd->add_option("--out", gen_config_path, "output file")
            ->required();
    gen_config_cmd->callback([&]() { cmd_gen_config(gen_config_path); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    catch (const OracleMismatch &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    catch (const Error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}

int cli_main(const std::vector<std::string> &args)
{
    std::vector<const char *> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("kraken-sim");
    for (const auto &arg : args)
    {
        argv.push_back(arg.c_str());
    }
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace kraken::cli
