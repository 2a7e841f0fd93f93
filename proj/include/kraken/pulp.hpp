#ifndef KRAKEN_PULP_HPP
#define KRAKEN_PULP_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace kraken::pulp {

// SIMD sub-word precision of the cluster's widening dot-product unit.
enum class Precision {
    Int8,
    Int4,
    Int2,
};

int bits(Precision p);
int lanes(Precision p); // 32 / bits
std::int32_t lane_min(Precision p);
std::int32_t lane_max(Precision p);
Precision precision_from_bits(int bits);

// 32-bit register interpreted as packed two's-complement lanes, lane 0 at
// the least-significant bits.
struct SimdWord {
    std::uint32_t raw = 0;
};

SimdWord encode(std::span<const std::int32_t> lane_values, Precision p);
std::vector<std::int32_t> decode(SimdWord w, Precision p);

// Widening dot product with 32-bit accumulate. For mixed precision the
// product count is 32/max(bits) and the lower-precision operand supplies
// its first lanes from the LSB. The final add wraps in two's complement.
std::int32_t simd_dotp(SimdWord a, Precision pa, SimdWord b, Precision pb,
        std::int32_t acc);

// Number of products per dotp issue for an (a_bits, w_bits) pair.
int mixed_lanes(int a_bits, int w_bits);

// A standalone convolutional layer patch: N_out output pixels, full
// accumulation over c_in * k^2 per output channel.
struct ConvPatchSpec {
    std::uint32_t n_out = 0;
    std::uint32_t c_in = 0;
    std::uint32_t c_out = 0;
    std::uint32_t k = 3;
    int a_bits = 8;
    int w_bits = 8;

    void validate() const;

    std::uint64_t total_macs() const
    {
        return static_cast<std::uint64_t>(n_out) * c_out * c_in * k * k;
    }
};

// Calibrated cycle model for the 8-core cluster. An inner MAC step costs
// one cycle with MAC-LD (load folded into the accumulate) and two without;
// every output accumulation loop pays a fixed overhead.
struct ClusterCycleModel {
    int cores = 8;
    double overhead_cycles_per_output = 0.0;
    double utilization_cap = 0.98;

    void validate() const;
};

struct PatchTiming {
    double cycles = 0.0; // per core, cores run in parallel
    std::uint64_t mac_steps_total = 0;
    double mac_steps_per_cycle_per_core = 0.0;
    double macs_per_cycle_per_core = 0.0; // scalar MACs, = steps rate * lanes
};

PatchTiming patch_cycles(const ConvPatchSpec &spec, bool mac_ld,
        const ClusterCycleModel &model);

// Sustained inference rate for a workload known only by its MAC budget,
// assuming MAC-LD inner loops at the utilization cap.
double cluster_inference_rate(std::uint64_t total_macs, Precision p,
        double freq_hz, const ClusterCycleModel &model);

// Solves the per-output overhead so that the MAC-LD / no-MAC-LD cycle
// ratio on the reference patch equals target_ratio.
double calibrate_overhead(const ConvPatchSpec &reference, double target_ratio);

} // namespace kraken::pulp

#endif
