#include <doctest.h>

#include <cstdlib>
#include <random>

#include "kraken/codec.hpp"
#include "kraken/cutie.hpp"
#include "kraken/errors.hpp"

using namespace kraken;
using codec::TernaryTensor;
using codec::Trit;
using cutie::AccumulatorMap;
using cutie::CutieNetwork;
using cutie::Pool;
using cutie::TernaryConvLayer;

namespace {

TernaryConvLayer make_layer(std::uint16_t k, std::uint16_t c_in,
        std::uint16_t c_out, Pool pool = Pool::None, bool final_layer = false)
{
    TernaryConvLayer layer;
    layer.k = k;
    layer.c_in = c_in;
    layer.c_out = c_out;
    layer.pool = pool;
    layer.is_final = final_layer;
    layer.weights.assign(layer.weight_numel(), 0);
    if (!final_layer)
    {
        layer.threshold_lo.assign(c_out, 0);
        layer.threshold_hi.assign(c_out, 0);
    }
    return layer;
}

// Independent convolution oracle: explicit zero-padded buffer, direct sums.
AccumulatorMap conv_oracle(const TernaryTensor &fm, const TernaryConvLayer &layer)
{
    const std::uint32_t pad = layer.k / 2;
    const std::uint32_t ph = fm.height + 2 * pad;
    const std::uint32_t pw = fm.width + 2 * pad;
    std::vector<std::int32_t> padded(
            static_cast<std::size_t>(ph) * pw * fm.channels, 0);
    const auto pidx = [&](std::uint32_t y, std::uint32_t x, std::uint32_t c) {
        return (static_cast<std::size_t>(y) * pw + x) * fm.channels + c;
    };
    for (std::uint32_t y = 0; y < fm.height; y++)
    {
        for (std::uint32_t x = 0; x < fm.width; x++)
        {
            for (std::uint32_t c = 0; c < fm.channels; c++)
            {
                padded[pidx(y + pad, x + pad, c)] = fm.at(y, x, c);
            }
        }
    }

    AccumulatorMap acc;
    acc.height = fm.height;
    acc.width = fm.width;
    acc.channels = layer.c_out;
    acc.data.assign(static_cast<std::size_t>(fm.height) * fm.width * layer.c_out, 0);
    for (std::uint32_t y = 0; y < fm.height; y++)
    {
        for (std::uint32_t x = 0; x < fm.width; x++)
        {
            for (std::uint32_t co = 0; co < layer.c_out; co++)
            {
                std::int32_t sum = 0;
                for (std::uint32_t ky = 0; ky < layer.k; ky++)
                {
                    for (std::uint32_t kx = 0; kx < layer.k; kx++)
                    {
                        for (std::uint32_t ci = 0; ci < layer.c_in; ci++)
                        {
                            sum += layer.weight(co, ci, ky, kx) *
                                    padded[pidx(y + ky, x + kx, ci)];
                        }
                    }
                }
                acc.data[acc.index(y, x, co)] = sum;
            }
        }
    }
    return acc;
}

} // namespace

TEST_SUITE_BEGIN("cutie");

TEST_CASE("all-ones 3x3 conv hits the zero-padding pattern")
{
    TernaryTensor fm = TernaryTensor::zeros(3, 3, 1);
    for (auto &v : fm.data)
    {
        v = 1;
    }
    auto layer = make_layer(3, 1, 1);
    for (auto &w : layer.weights)
    {
        w = 1;
    }
    const auto acc = cutie::ternary_conv(fm, layer);
    CHECK(acc.at(1, 1, 0) == 9);
    CHECK(acc.at(0, 1, 0) == 6);
    CHECK(acc.at(1, 0, 0) == 6);
    CHECK(acc.at(0, 0, 0) == 4);
    CHECK(acc.at(2, 2, 0) == 4);
}

TEST_CASE("conv matches an independent padded oracle")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 24; trial++)
    {
        CAPTURE(trial);
        const std::uint16_t k = (rng() % 2 == 0) ? 3 : 1;
        const auto c_in = static_cast<std::uint16_t>(1 + rng() % 5);
        const auto c_out = static_cast<std::uint16_t>(1 + rng() % 5);
        const auto h = static_cast<std::uint32_t>(1 + rng() % 7);
        const auto w = static_cast<std::uint32_t>(1 + rng() % 7);

        TernaryTensor fm = TernaryTensor::zeros(h, w, c_in);
        for (auto &v : fm.data)
        {
            v = static_cast<Trit>(static_cast<int>(rng() % 3) - 1);
        }
        auto layer = make_layer(k, c_in, c_out);
        for (auto &wt : layer.weights)
        {
            wt = static_cast<Trit>(static_cast<int>(rng() % 3) - 1);
        }

        const auto got = cutie::ternary_conv(fm, layer);
        const auto want = conv_oracle(fm, layer);
        CHECK(got.data == want.data);

        const std::int32_t bound = static_cast<std::int32_t>(k) * k * c_in;
        for (const auto v : got.data)
        {
            CHECK(std::abs(v) <= bound);
        }
    }
}

TEST_CASE("conv rejects channel mismatches")
{
    const TernaryTensor fm = TernaryTensor::zeros(2, 2, 2);
    const auto layer = make_layer(3, 3, 1);
    CHECK_THROWS_AS(cutie::ternary_conv(fm, layer), ChannelMismatch);
}

TEST_CASE("ternarize uses strict two-sided thresholds")
{
    auto layer = make_layer(1, 1, 1);
    layer.threshold_lo = {-3};
    layer.threshold_hi = {5};

    AccumulatorMap acc;
    acc.height = 1;
    acc.width = 4;
    acc.channels = 1;
    acc.data = {5, 6, -3, -4}; // hi, hi+1, lo, lo-1
    const auto out = cutie::ternarize(acc, layer);
    CHECK(out.data == std::vector<Trit>{0, 1, 0, -1});

    auto final_layer = make_layer(1, 1, 1, Pool::None, true);
    CHECK_THROWS_AS(cutie::ternarize(acc, final_layer), SchemaViolation);

    AccumulatorMap wrong;
    wrong.height = 1;
    wrong.width = 1;
    wrong.channels = 2;
    wrong.data = {0, 0};
    CHECK_THROWS_AS(cutie::ternarize(wrong, layer), ChannelMismatch);
}

TEST_CASE("max pooling orders trits -1 < 0 < +1 and floors odd dims")
{
    TernaryTensor t = TernaryTensor::zeros(2, 2, 1);
    t.data = {-1, 0, -1, -1};
    CHECK(cutie::max_pool2(t).data == std::vector<Trit>{0});
    t.data = {-1, 1, 0, -1};
    CHECK(cutie::max_pool2(t).data == std::vector<Trit>{1});

    TernaryTensor odd = TernaryTensor::zeros(3, 3, 1);
    odd.data = {-1, -1, 0,
            -1, -1, 1,
            1, 1, 1}; // the +1s live only in the dropped row/column
    const auto pooled = cutie::max_pool2(odd);
    CHECK(pooled.height == 1);
    CHECK(pooled.width == 1);
    CHECK(pooled.data == std::vector<Trit>{-1});

    const TernaryTensor rect = TernaryTensor::zeros(5, 4, 2);
    const auto p2 = cutie::max_pool2(rect);
    CHECK(p2.height == 2);
    CHECK(p2.width == 2);
    CHECK(p2.channels == 2);

    const auto degenerate = cutie::max_pool2(TernaryTensor::zeros(1, 1, 3));
    CHECK(degenerate.numel() == 0);
}

TEST_CASE("hand-frozen two-layer forward")
{
    CutieNetwork net;
    net.input_height = 2;
    net.input_width = 2;
    net.input_channels = 1;

    auto l0 = make_layer(1, 1, 2, Pool::Max2);
    l0.weight(0, 0, 0, 0) = 1;
    l0.weight(1, 0, 0, 0) = -1;
    net.layers.push_back(l0);

    auto l1 = make_layer(1, 2, 2, Pool::None, true);
    l1.weight(0, 0, 0, 0) = 1;
    l1.weight(0, 1, 0, 0) = 1;
    l1.weight(1, 0, 0, 0) = 1;
    l1.weight(1, 1, 0, 0) = -1;
    net.layers.push_back(l1);

    TernaryTensor input = TernaryTensor::zeros(2, 2, 1);
    input.data = {1, -1, 0, 1};

    const auto result = cutie::cutie_forward(net, input);
    CHECK(result.scores == std::vector<std::int64_t>{2, 0});
    CHECK(result.argmax == 0);
}

TEST_CASE("score ties resolve to the lowest class index")
{
    CutieNetwork net;
    net.input_height = 2;
    net.input_width = 2;
    net.input_channels = 1;
    net.layers.push_back(make_layer(1, 1, 4, Pool::None, true)); // all-zero weights

    TernaryTensor input = TernaryTensor::zeros(2, 2, 1);
    input.data = {1, 1, -1, 0};
    const auto result = cutie::cutie_forward(net, input);
    CHECK(result.scores == std::vector<std::int64_t>{0, 0, 0, 0});
    CHECK(result.argmax == 0);
}

TEST_CASE("validation rejects unsupported shapes")
{
    CHECK_THROWS_AS(make_layer(3, 97, 1).validate(), UnsupportedShape);
    CHECK_THROWS_AS(make_layer(3, 1, 97).validate(), UnsupportedShape);
    CHECK_THROWS_AS(make_layer(2, 1, 1).validate(), UnsupportedShape);
    CHECK_THROWS_AS(make_layer(5, 1, 1).validate(), UnsupportedShape);
    CHECK_NOTHROW(make_layer(3, 96, 96).validate());
    CHECK_NOTHROW(make_layer(1, 96, 96).validate());

    auto bad_trit = make_layer(1, 1, 1);
    bad_trit.weights[0] = 2;
    CHECK_THROWS_AS(bad_trit.validate(), SchemaViolation);

    auto inverted = make_layer(1, 1, 1);
    inverted.threshold_lo = {1};
    inverted.threshold_hi = {0};
    CHECK_THROWS_AS(inverted.validate(), SchemaViolation);

    CutieNetwork net;
    net.input_height = 2;
    net.input_width = 2;
    net.input_channels = 1;
    net.layers.push_back(make_layer(1, 1, 2));
    net.layers.push_back(make_layer(1, 3, 2, Pool::None, true));
    CHECK_THROWS_AS(net.validate(), SchemaViolation); // 2 -> 3 channel break

    net.layers[1].c_in = 2;
    net.layers[1].weights.assign(net.layers[1].weight_numel(), 0);
    CHECK_NOTHROW(net.validate());

    net.layers[1].is_final = false;
    net.layers[1].threshold_lo.assign(2, 0);
    net.layers[1].threshold_hi.assign(2, 0);
    CHECK_THROWS_AS(net.validate(), SchemaViolation); // last layer not final

    net.layers[1].is_final = true;
    net.layers[1].pool = Pool::Max2;
    CHECK_THROWS_AS(net.validate(), SchemaViolation); // final layer cannot pool
}

namespace {

CutieNetwork cifar_scale_net()
{
    CutieNetwork net;
    net.input_height = 32;
    net.input_width = 32;
    net.input_channels = 3;
    net.layers.push_back(make_layer(3, 3, 48));
    net.layers.push_back(make_layer(3, 48, 48, Pool::Max2));
    net.layers.push_back(make_layer(3, 48, 96));
    net.layers.push_back(make_layer(3, 96, 96, Pool::Max2));
    net.layers.push_back(make_layer(3, 96, 96));
    net.layers.push_back(make_layer(3, 96, 96, Pool::Max2));
    net.layers.push_back(make_layer(1, 96, 10, Pool::None, true));
    return net;
}

} // namespace

TEST_CASE("cycle model on a CIFAR-scale topology")
{
    const auto net = cifar_scale_net();
    CHECK(cutie::cutie_cycles(net) == 2704.0); // 1024+1024+256+256+64+64+16
    CHECK(cutie::cutie_cycles(net, 10.0) == 2774.0);
    CHECK(cutie::cutie_inf_per_s(net, 330e6) ==
            doctest::Approx(122041.42).epsilon(1e-6));

    CHECK(cutie::count_ops(net) == 130086912);
    // Utilization can never exceed the unrolled datapath peak.
    CHECK(static_cast<double>(cutie::count_ops(net)) <=
            cutie::kPeakOpsPerCycle * cutie::cutie_cycles(net));
    CHECK(cutie::kPeakOpsPerCycle == 2ull * 96 * 96 * 3 * 3);

    const auto mem = cutie::cutie_memcheck(net);
    CHECK(mem.weight_bytes == 62662);
    CHECK(mem.fm_bytes == 19662);
    CHECK(mem.fits);

    CutieNetwork empty;
    empty.input_height = 1;
    empty.input_width = 1;
    empty.input_channels = 1;
    CHECK_THROWS_AS(cutie::cutie_inf_per_s(empty, 330e6), DegenerateWorkload);
}

TEST_CASE("single-layer op count")
{
    CutieNetwork net;
    net.input_height = 4;
    net.input_width = 4;
    net.input_channels = 2;
    net.layers.push_back(make_layer(3, 2, 3, Pool::None, true));
    CHECK(cutie::count_ops(net) == 2 * 16 * 3 * 2 * 9);
}

TEST_CASE("weight memory boundary sits at exactly 585000 trits")
{
    CutieNetwork net;
    net.input_height = 4;
    net.input_width = 4;
    net.input_channels = 90;
    for (int i = 0; i < 8; i++)
    {
        net.layers.push_back(make_layer(3, 90, 90)); // 72900 trits each
    }
    net.layers.push_back(make_layer(1, 90, 10)); // 900
    net.layers.push_back(make_layer(1, 10, 60)); // 600
    net.layers.push_back(make_layer(1, 60, 5, Pool::None, true)); // 300

    std::uint64_t trits = 0;
    for (const auto &layer : net.layers)
    {
        trits += layer.weight_numel();
    }
    REQUIRE(trits == 585000);
    CHECK_NOTHROW(net.validate());

    auto mem = cutie::cutie_memcheck(net);
    CHECK(mem.weight_bytes == 117000);
    CHECK(mem.weight_fits);
    CHECK(mem.fits);

    // Five more trits spill into one more byte and out of the budget.
    net.layers.back().is_final = false;
    net.layers.back().threshold_lo.assign(5, 0);
    net.layers.back().threshold_hi.assign(5, 0);
    net.layers.push_back(make_layer(1, 5, 1, Pool::None, true));
    mem = cutie::cutie_memcheck(net);
    CHECK(mem.weight_bytes == 117001);
    CHECK_FALSE(mem.weight_fits);
    CHECK_FALSE(mem.fits);
}

TEST_CASE("feature-map memory boundary")
{
    CutieNetwork net;
    net.input_height = 64;
    net.input_width = 64;
    net.input_channels = 96;
    net.layers.push_back(make_layer(3, 96, 96, Pool::None, true));
    auto mem = cutie::cutie_memcheck(net);
    CHECK(mem.fm_bytes == 157288); // 2 * ceil(64*64*96 / 5)
    CHECK(mem.fm_fits);

    net.input_height = 65;
    net.input_width = 65;
    mem = cutie::cutie_memcheck(net);
    CHECK(mem.fm_bytes == 162240);
    CHECK_FALSE(mem.fm_fits);

    const auto input = codec::TernaryTensor::zeros(65, 65, 96);
    CHECK_THROWS_AS(cutie::cutie_forward(net, input), MemoryBudgetExceeded);
}

TEST_CASE("forward input dimension enforcement")
{
    CutieNetwork net;
    net.input_height = 2;
    net.input_width = 2;
    net.input_channels = 1;
    net.layers.push_back(make_layer(1, 1, 1, Pool::None, true));
    const auto wrong = codec::TernaryTensor::zeros(3, 2, 1);
    CHECK_THROWS_AS(cutie::cutie_forward(net, wrong), InvalidDims);

    CutieNetwork empty;
    empty.input_height = 2;
    empty.input_width = 2;
    empty.input_channels = 1;
    const auto input = codec::TernaryTensor::zeros(2, 2, 1);
    CHECK_THROWS_AS(cutie::cutie_forward(empty, input), InvalidDims);
}

TEST_SUITE_END();
