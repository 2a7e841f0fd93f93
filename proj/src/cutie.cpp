#include "kraken/cutie.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "kraken/errors.hpp"

namespace kraken::cutie {

void TernaryConvLayer::validate() const
{
    if (c_in == 0 || c_out == 0)
    {
        throw InvalidDims("conv layer has zero channels");
    }
    if (c_out > kMaxChannels || c_in > kMaxChannels)
    {
        throw UnsupportedShape("conv layer " + std::to_string(c_in) + "->" +
                std::to_string(c_out) + " exceeds the " + std::to_string(kMaxChannels) +
                " parallel channel limit");
    }
    if (k == 0 || k > kMaxKernel || k % 2 == 0)
    {
        throw UnsupportedShape("kernel size " + std::to_string(k) +
                " not mappable to the unrolled 3x3 datapath");
    }
    if (weights.size() != weight_numel())
    {
        throw InvalidDims("conv layer holds " + std::to_string(weights.size()) +
                " weights, expected " + std::to_string(weight_numel()));
    }
    for (const codec::Trit w : weights)
    {
        if (!codec::is_trit(w))
        {
            throw SchemaViolation("conv weight " + std::to_string(w) + " is not a trit");
        }
    }
    if (!is_final)
    {
        if (threshold_lo.size() != c_out || threshold_hi.size() != c_out)
        {
            throw SchemaViolation("layer needs one (lo, hi) threshold pair per output channel");
        }
        for (std::uint32_t c = 0; c < c_out; c++)
        {
            if (threshold_lo[c] > threshold_hi[c])
            {
                throw SchemaViolation("channel " + std::to_string(c) +
                        " thresholds are inverted (lo > hi)");
            }
        }
    }
}

void CutieNetwork::validate() const
{
    if (input_height == 0 || input_width == 0 || input_channels == 0)
    {
        throw InvalidDims("network input dims contain a zero");
    }
    std::uint32_t channels = input_channels;
    for (std::size_t l = 0; l < layers.size(); l++)
    {
        const TernaryConvLayer &layer = layers[l];
        layer.validate();
        if (layer.c_in != channels)
        {
            throw SchemaViolation("layer " + std::to_string(l) + " expects " +
                    std::to_string(layer.c_in) + " input channels, previous stage emits " +
                    std::to_string(channels));
        }
        const bool last = l + 1 == layers.size();
        if (layer.is_final != last)
        {
            throw SchemaViolation(last ? "last layer must be marked final"
                                       : "only the last layer may be marked final");
        }
        if (layer.is_final && layer.pool != Pool::None)
        {
            throw SchemaViolation("final layer emits class accumulators and cannot pool");
        }
        channels = layer.c_out;
    }
}

AccumulatorMap ternary_conv(const codec::TernaryTensor &fm,
        const TernaryConvLayer &layer)
{
    layer.validate();
    if (fm.channels != layer.c_in)
    {
        throw ChannelMismatch("feature map has " + std::to_string(fm.channels) +
                " channels, layer expects " + std::to_string(layer.c_in));
    }

    AccumulatorMap acc;
    acc.height = fm.height;
    acc.width = fm.width;
    acc.channels = layer.c_out;
    acc.data.assign(static_cast<std::size_t>(fm.height) * fm.width * layer.c_out, 0);

    const int half = layer.k / 2;
    for (std::uint32_t y = 0; y < fm.height; y++)
    {
        for (std::uint32_t x = 0; x < fm.width; x++)
        {
            for (std::uint32_t co = 0; co < layer.c_out; co++)
            {
                std::int32_t sum = 0;
                for (std::uint32_t ky = 0; ky < layer.k; ky++)
                {
                    const int sy = static_cast<int>(y) + static_cast<int>(ky) - half;
                    if (sy < 0 || sy >= static_cast<int>(fm.height))
                    {
                        continue;
                    }
                    for (std::uint32_t kx = 0; kx < layer.k; kx++)
                    {
                        const int sx = static_cast<int>(x) + static_cast<int>(kx) - half;
                        if (sx < 0 || sx >= static_cast<int>(fm.width))
                        {
                            continue;
                        }
                        for (std::uint32_t ci = 0; ci < layer.c_in; ci++)
                        {
                            sum += static_cast<std::int32_t>(layer.weight(co, ci, ky, kx)) *
                                    static_cast<std::int32_t>(
                                            fm.at(static_cast<std::uint32_t>(sy),
                                                    static_cast<std::uint32_t>(sx), ci));
                        }
                    }
                }
                acc.data[acc.index(y, x, co)] = sum;
            }
        }
    }
    return acc;
}

codec::TernaryTensor ternarize(const AccumulatorMap &acc,
        const TernaryConvLayer &layer)
{
    if (layer.is_final)
    {
        throw SchemaViolation("final layer output is not ternarized");
    }
    if (acc.channels != layer.c_out)
    {
        throw ChannelMismatch("accumulator map channel count does not match layer");
    }
    codec::TernaryTensor out = codec::TernaryTensor::zeros(acc.height, acc.width,
            acc.channels);
    for (std::size_t i = 0; i < acc.data.size(); i++)
    {
        const std::uint32_t c = static_cast<std::uint32_t>(i % acc.channels);
        const std::int32_t v = acc.data[i];
        if (v > layer.threshold_hi[c])
        {
            out.data[i] = 1;
        }
        else if (v < layer.threshold_lo[c])
        {
            out.data[i] = -1;
        }
    }
    return out;
}

codec::TernaryTensor max_pool2(const codec::TernaryTensor &t)
{
    codec::TernaryTensor out =
            codec::TernaryTensor::zeros(t.height / 2, t.width / 2, t.channels);
    for (std::uint32_t y = 0; y < out.height; y++)
    {
        for (std::uint32_t x = 0; x < out.width; x++)
        {
            for (std::uint32_t c = 0; c < t.channels; c++)
            {
                codec::Trit m = t.at(2 * y, 2 * x, c);
                m = std::max(m, t.at(2 * y, 2 * x + 1, c));
                m = std::max(m, t.at(2 * y + 1, 2 * x, c));
                m = std::max(m, t.at(2 * y + 1, 2 * x + 1, c));
                out.at(y, x, c) = m;
            }
        }
    }
    return out;
}

ForwardResult cutie_forward(const CutieNetwork &net,
        const codec::TernaryTensor &input)
{
    net.validate();
    if (net.layers.empty())
    {
        throw InvalidDims("network has no layers");
    }
    const CutieMemoryReport mem = cutie_memcheck(net);
    if (!mem.fits)
    {
        throw MemoryBudgetExceeded("network needs " + std::to_string(mem.weight_bytes) +
                " weight bytes (budget " + std::to_string(kWeightMemoryBytes) + ") and " +
                std::to_string(mem.fm_bytes) + " feature-map bytes (budget " +
                std::to_string(kFeatureMapMemoryBytes) + ")");
    }
    input.validate();
    if (input.height != net.input_height || input.width != net.input_width)
    {
        throw InvalidDims("input is " + std::to_string(input.width) + "x" +
                std::to_string(input.height) + ", network expects " +
                std::to_string(net.input_width) + "x" + std::to_string(net.input_height));
    }

    codec::TernaryTensor fm = input;
    ForwardResult result;
    for (const TernaryConvLayer &layer : net.layers)
    {
        const AccumulatorMap acc = ternary_conv(fm, layer);
        if (layer.is_final)
        {
            result.scores.assign(layer.c_out, 0);
            for (std::uint32_t y = 0; y < acc.height; y++)
            {
                for (std::uint32_t x = 0; x < acc.width; x++)
                {
                    for (std::uint32_t c = 0; c < acc.channels; c++)
                    {
                        result.scores[c] += acc.at(y, x, c);
                    }
                }
            }
            break;
        }
        fm = ternarize(acc, layer);
        if (layer.pool == Pool::Max2)
        {
            fm = max_pool2(fm);
        }
    }

    result.argmax = static_cast<std::uint32_t>(std::distance(result.scores.begin(),
            std::max_element(result.scores.begin(), result.scores.end())));
    return result;
}

namespace {

// Spatial dims of every layer's conv output, following the pooling chain.
std::vector<std::pair<std::uint32_t, std::uint32_t>> layer_output_dims(
        const CutieNetwork &net)
{
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dims;
    std::uint32_t h = net.input_height;
    std::uint32_t w = net.input_width;
    for (const TernaryConvLayer &layer : net.layers)
    {
        dims.emplace_back(h, w); // "same" padding keeps spatial size
        if (layer.pool == Pool::Max2)
        {
            h /= 2;
            w /= 2;
        }
    }
    return dims;
}

} // namespace

double cutie_cycles(const CutieNetwork &net, double overhead_per_layer)
{
    net.validate();
    const auto dims = layer_output_dims(net);
    double cycles = 0.0;
    for (const auto &[h, w] : dims)
    {
        cycles += static_cast<double>(h) * static_cast<double>(w);
    }
    cycles += overhead_per_layer * static_cast<double>(net.layers.size());
    return cycles;
}

double cutie_inf_per_s(const CutieNetwork &net, double freq_hz,
        double overhead_per_layer)
{
    const double cycles = cutie_cycles(net, overhead_per_layer);
    if (cycles <= 0.0)
    {
        throw DegenerateWorkload("network costs zero cycles");
    }
    return freq_hz / cycles;
}

CutieMemoryReport cutie_memcheck(const CutieNetwork &net)
{
    CutieMemoryReport report;
    std::uint32_t h = net.input_height;
    std::uint32_t w = net.input_width;
    std::uint32_t c = net.input_channels;
    for (const TernaryConvLayer &layer : net.layers)
    {
        report.weight_bytes += codec::packed_size_bytes(layer.weight_numel());
        const std::uint64_t in_fm = codec::packed_size_bytes(
                static_cast<std::uint64_t>(h) * w * c);
        const std::uint64_t out_fm = codec::packed_size_bytes(
                static_cast<std::uint64_t>(h) * w * layer.c_out);
        report.fm_bytes = std::max(report.fm_bytes, in_fm + out_fm);
        if (layer.pool == Pool::Max2)
        {
            h /= 2;
            w /= 2;
        }
        c = layer.c_out;
    }
    report.weight_fits = report.weight_bytes <= kWeightMemoryBytes;
    report.fm_fits = report.fm_bytes <= kFeatureMapMemoryBytes;
    report.fits = report.weight_fits && report.fm_fits;
    return report;
}

std::uint64_t count_ops(const CutieNetwork &net)
{
    const auto dims = layer_output_dims(net);
    std::uint64_t macs = 0;
    for (std::size_t l = 0; l < net.layers.size(); l++)
    {
        const TernaryConvLayer &layer = net.layers[l];
        macs += static_cast<std::uint64_t>(dims[l].first) * dims[l].second *
                layer.c_out * layer.c_in * layer.k * layer.k;
    }
    return 2 * macs;
}

} // namespace kraken::cutie
