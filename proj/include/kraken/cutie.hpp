#ifndef KRAKEN_CUTIE_HPP
#define KRAKEN_CUTIE_HPP

#include <cstdint>
#include <vector>

#include "kraken/codec.hpp"

namespace kraken::cutie {

// Datapath limits of the unrolled engine: 96 output channels computed in
// parallel, kernels unrolled up to 3x3.
inline constexpr std::uint32_t kMaxChannels = 96;
inline constexpr std::uint32_t kMaxKernel = 3;
inline constexpr std::uint64_t kWeightMemoryBytes = 117000;
inline constexpr std::uint64_t kFeatureMapMemoryBytes = 158000;
// 2 * 96 * 96 * 3 * 3 ternary Ops per cycle at full utilization.
inline constexpr std::uint64_t kPeakOpsPerCycle = 165888;

enum class Pool {
    None,
    Max2, // 2x2 max pooling, stride 2, trit order -1 < 0 < +1
};

struct TernaryConvLayer {
    std::uint16_t k = 3;
    std::uint16_t c_in = 0;
    std::uint16_t c_out = 0;
    // (c_out, c_in, ky, kx) row-major ternary weights.
    std::vector<codec::Trit> weights;
    // Folded per-channel normalization + activation: out = +1 above hi,
    // -1 below lo, 0 in the dead zone. Unused on the final layer.
    std::vector<std::int32_t> threshold_lo;
    std::vector<std::int32_t> threshold_hi;
    Pool pool = Pool::None;
    // The final layer emits spatially-summed integer accumulators per
    // class instead of ternarizing.
    bool is_final = false;

    std::size_t weight_numel() const
    {
        return static_cast<std::size_t>(c_out) * c_in * k * k;
    }

    codec::Trit weight(std::uint32_t co, std::uint32_t ci, std::uint32_t ky,
            std::uint32_t kx) const
    {
        return weights[((static_cast<std::size_t>(co) * c_in + ci) * k + ky) * k + kx];
    }

    codec::Trit &weight(std::uint32_t co, std::uint32_t ci, std::uint32_t ky,
            std::uint32_t kx)
    {
        return weights[((static_cast<std::size_t>(co) * c_in + ci) * k + ky) * k + kx];
    }

    void validate() const;
};

struct CutieNetwork {
    std::uint32_t input_height = 0;
    std::uint32_t input_width = 0;
    std::uint32_t input_channels = 0;
    std::vector<TernaryConvLayer> layers;

    // Channel chaining plus per-layer checks; exactly the last layer may be
    // final. Memory budgets are reported by cutie_memcheck.
    void validate() const;
};

// Integer accumulator map, same layout as TernaryTensor.
struct AccumulatorMap {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;
    std::vector<std::int32_t> data;

    std::size_t index(std::uint32_t y, std::uint32_t x, std::uint32_t c) const
    {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }

    std::int32_t at(std::uint32_t y, std::uint32_t x, std::uint32_t c) const
    {
        return data[index(y, x, c)];
    }
};

// Ternary convolution, zero padding "same", stride 1. |acc| <= k^2 * c_in.
AccumulatorMap ternary_conv(const codec::TernaryTensor &fm,
        const TernaryConvLayer &layer);

// Per-channel two-threshold ternarization of an accumulator map.
codec::TernaryTensor ternarize(const AccumulatorMap &acc,
        const TernaryConvLayer &layer);

// 2x2 max pooling with stride 2; odd trailing rows/columns are dropped.
codec::TernaryTensor max_pool2(const codec::TernaryTensor &t);

struct ForwardResult {
    std::vector<std::int64_t> scores;
    std::uint32_t argmax = 0;
};

// Chains conv -> ternarize -> pool per layer; the final layer returns
// spatially-summed accumulators per class, ties broken by lowest index.
ForwardResult cutie_forward(const CutieNetwork &net,
        const codec::TernaryTensor &input);

// One output element per cycle per (parallel) output channel: each layer
// costs H_out * W_out cycles plus a configurable per-layer overhead.
double cutie_cycles(const CutieNetwork &net, double overhead_per_layer = 0.0);

double cutie_inf_per_s(const CutieNetwork &net, double freq_hz,
        double overhead_per_layer = 0.0);

struct CutieMemoryReport {
    std::uint64_t weight_bytes = 0;
    std::uint64_t fm_bytes = 0; // max over layers of packed in + out maps
    bool weight_fits = false;
    bool fm_fits = false;
    bool fits = false;
};

CutieMemoryReport cutie_memcheck(const CutieNetwork &net);

// Total ternary Ops: 2 Ops per ternary MAC.
std::uint64_t count_ops(const CutieNetwork &net);

} // namespace kraken::cutie

#endif
