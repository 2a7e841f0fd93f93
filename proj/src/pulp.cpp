#include "kraken/pulp.hpp"

#include <algorithm>
#include <string>

#include "kraken/errors.hpp"

namespace kraken::pulp {

int bits(Precision p)
{
    switch (p)
    {
    case Precision::Int8:
        return 8;
    case Precision::Int4:
        return 4;
    case Precision::Int2:
        return 2;
    }
    return 0;
}

int lanes(Precision p)
{
    return 32 / bits(p);
}

std::int32_t lane_min(Precision p)
{
    return -(1 << (bits(p) - 1));
}

std::int32_t lane_max(Precision p)
{
    return (1 << (bits(p) - 1)) - 1;
}

Precision precision_from_bits(int b)
{
    switch (b)
    {
    case 8:
        return Precision::Int8;
    case 4:
        return Precision::Int4;
    case 2:
        return Precision::Int2;
    default:
        throw UnsupportedShape("no SIMD precision with " + std::to_string(b) + " bits");
    }
}

SimdWord encode(std::span<const std::int32_t> lane_values, Precision p)
{
    const int n = lanes(p);
    if (lane_values.size() != static_cast<std::size_t>(n))
    {
        throw InvalidDims("expected " + std::to_string(n) + " lane values, got " +
                std::to_string(lane_values.size()));
    }
    const int w = bits(p);
    const std::uint32_t mask = (w == 32) ? ~0u : ((1u << w) - 1u);
    SimdWord word;
    for (int i = 0; i < n; i++)
    {
        const std::int32_t v = lane_values[i];
        if (v < lane_min(p) || v > lane_max(p))
        {
            throw InvalidRange("lane value " + std::to_string(v) + " outside int" +
                    std::to_string(w) + " range");
        }
        word.raw |= (static_cast<std::uint32_t>(v) & mask)
                << static_cast<unsigned>(i * w);
    }
    return word;
}

namespace {

std::int32_t extract_lane(SimdWord word, Precision p, int lane)
{
    const int w = bits(p);
    const std::uint32_t mask = (1u << w) - 1u;
    const std::uint32_t field = (word.raw >> static_cast<unsigned>(lane * w)) & mask;
    const std::uint32_t sign = 1u << (w - 1);
    // Sign-extend the lane field.
    return static_cast<std::int32_t>((field ^ sign)) - static_cast<std::int32_t>(sign);
}

} // namespace

std::vector<std::int32_t> decode(SimdWord w, Precision p)
{
    std::vector<std::int32_t> out(static_cast<std::size_t>(lanes(p)));
    for (int i = 0; i < lanes(p); i++)
    {
        out[static_cast<std::size_t>(i)] = extract_lane(w, p, i);
    }
    return out;
}

std::int32_t simd_dotp(SimdWord a, Precision pa, SimdWord b, Precision pb,
        std::int32_t acc)
{
    const int n = 32 / std::max(bits(pa), bits(pb));
    std::int32_t sum = 0;
    for (int i = 0; i < n; i++)
    {
        // Max |sum| is 4 * 128 * 128, far inside 32 bits.
        sum += extract_lane(a, pa, i) * extract_lane(b, pb, i);
    }
    // Two's-complement wrap on the final accumulate.
    return static_cast<std::int32_t>(
            static_cast<std::uint32_t>(acc) + static_cast<std::uint32_t>(sum));
}

int mixed_lanes(int a_bits, int w_bits)
{
    precision_from_bits(std::min(a_bits, w_bits));
    return lanes(precision_from_bits(std::max(a_bits, w_bits)));
}

void ConvPatchSpec::validate() const
{
    if (n_out == 0 || c_in == 0 || c_out == 0 || k == 0)
    {
        throw InvalidDims("conv patch has a zero dimension");
    }
    precision_from_bits(a_bits);
    precision_from_bits(w_bits);
}

void ClusterCycleModel::validate() const
{
    if (cores <= 0)
    {
        throw InvalidDims("cluster model needs at least one core");
    }
    if (utilization_cap <= 0.0 || utilization_cap > 1.0)
    {
        throw InvalidRange("utilization cap must be in (0, 1]");
    }
    if (overhead_cycles_per_output < 0.0)
    {
        throw InvalidRange("loop overhead cannot be negative");
    }
}

PatchTiming patch_cycles(const ConvPatchSpec &spec, bool mac_ld,
        const ClusterCycleModel &model)
{
    spec.validate();
    model.validate();

    const std::uint64_t ln =
            static_cast<std::uint64_t>(mixed_lanes(spec.a_bits, spec.w_bits));
    const std::uint64_t depth = static_cast<std::uint64_t>(spec.c_in) * spec.k * spec.k;
    const std::uint64_t steps_per_output = (depth + ln - 1) / ln;
    const std::uint64_t outputs = static_cast<std::uint64_t>(spec.n_out) * spec.c_out;
    const std::uint64_t outputs_core =
            (outputs + static_cast<std::uint64_t>(model.cores) - 1) /
            static_cast<std::uint64_t>(model.cores);
    const std::uint64_t steps_core = outputs_core * steps_per_output;

    PatchTiming t;
    t.mac_steps_total = outputs * steps_per_output;
    if (steps_core == 0)
    {
        return t;
    }

    const double cpi = mac_ld ? 1.0 : 2.0;
    const double raw = static_cast<double>(steps_core) * cpi +
            model.overhead_cycles_per_output * static_cast<double>(outputs_core);
    // The issue rate can never exceed the utilization cap.
    t.cycles = std::max(raw, static_cast<double>(steps_core) / model.utilization_cap);
    t.mac_steps_per_cycle_per_core = static_cast<double>(steps_core) / t.cycles;
    t.macs_per_cycle_per_core =
            t.mac_steps_per_cycle_per_core * static_cast<double>(ln);
    return t;
}

double cluster_inference_rate(std::uint64_t total_macs, Precision p,
        double freq_hz, const ClusterCycleModel &model)
{
    model.validate();
    if (total_macs == 0)
    {
        throw DegenerateWorkload("workload has no MACs");
    }
    if (freq_hz <= 0.0)
    {
        throw InvalidRange("frequency must be positive");
    }
    const std::uint64_t ln = static_cast<std::uint64_t>(lanes(p));
    const std::uint64_t steps = (total_macs + ln - 1) / ln;
    const std::uint64_t steps_core =
            (steps + static_cast<std::uint64_t>(model.cores) - 1) /
            static_cast<std::uint64_t>(model.cores);
    const double cycles = static_cast<double>(steps_core) / model.utilization_cap;
    return freq_hz / cycles;
}

double calibrate_overhead(const ConvPatchSpec &reference, double target_ratio)
{
    reference.validate();
    if (target_ratio <= 1.0 || target_ratio >= 2.0)
    {
        throw InvalidRange("cycle ratio must lie strictly between 1 (no gain) and 2 "
                           "(bare MAC-LD gain)");
    }
    const std::uint64_t ln = static_cast<std::uint64_t>(
            mixed_lanes(reference.a_bits, reference.w_bits));
    const std::uint64_t depth =
            static_cast<std::uint64_t>(reference.c_in) * reference.k * reference.k;
    const std::uint64_t steps_per_output = (depth + ln - 1) / ln;
    // (2s + O) / (s + O) = R  =>  O = s (2 - R) / (R - 1)
    return static_cast<double>(steps_per_output) * (2.0 - target_ratio) /
            (target_ratio - 1.0);
}

} // namespace kraken::pulp
