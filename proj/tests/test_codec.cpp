#include <doctest.h>

#include <array>
#include <random>

#include "kraken/codec.hpp"
#include "kraken/errors.hpp"

using namespace kraken;
using codec::Trit;

TEST_SUITE_BEGIN("codec");

TEST_CASE("pack_trits frozen examples")
{
    const std::array<Trit, 5> zeros = {0, 0, 0, 0, 0};
    CHECK(codec::pack_trits(zeros) == 121); // 1 * (1 + 3 + 9 + 27 + 81)
    const std::array<Trit, 5> minus = {-1, -1, -1, -1, -1};
    CHECK(codec::pack_trits(minus) == 0);
    const std::array<Trit, 5> plus = {1, 1, 1, 1, 1};
    CHECK(codec::pack_trits(plus) == 242);
    const std::array<Trit, 5> unit = {1, 0, 0, 0, 0};
    CHECK(codec::pack_trits(unit) == 122);
    const std::array<Trit, 5> mixed = {-1, 0, 1, 1, 0};
    CHECK(codec::pack_trits(mixed) == 156); // 0 + 3 + 18 + 54 + 81
}

TEST_CASE("pack/unpack is a bijection over all 243 codes")
{
    bool seen[243] = {};
    std::array<Trit, 5> trits{};
    for (int a = -1; a <= 1; a++)
        for (int b = -1; b <= 1; b++)
            for (int c = -1; c <= 1; c++)
                for (int d = -1; d <= 1; d++)
                    for (int e = -1; e <= 1; e++)
                    {
                        trits = {static_cast<Trit>(a), static_cast<Trit>(b),
                                static_cast<Trit>(c), static_cast<Trit>(d),
                                static_cast<Trit>(e)};
                        const std::uint8_t byte = codec::pack_trits(trits);
                        REQUIRE(byte <= codec::kMaxPackedByte);
                        REQUIRE_FALSE(seen[byte]);
                        seen[byte] = true;
                        REQUIRE(codec::unpack_trits(byte) == trits);
                    }
    for (int byte = 0; byte <= 242; byte++)
    {
        CHECK(seen[byte]);
    }
}

TEST_CASE("unpack rejects bytes above 242")
{
    for (int byte = 243; byte <= 255; byte++)
    {
        CHECK_THROWS_AS(codec::unpack_trits(static_cast<std::uint8_t>(byte)),
                InvalidEncoding);
    }
}

TEST_CASE("packed sizes and density")
{
    CHECK(codec::packed_size_bytes(0) == 0);
    CHECK(codec::packed_size_bytes(1) == 1);
    CHECK(codec::packed_size_bytes(5) == 1);
    CHECK(codec::packed_size_bytes(6) == 2);
    CHECK(codec::packed_size_bytes(585000) == 117000);
    CHECK(codec::packed_size_bytes(585005) == 117001);
    // 8 bits per 5 trits = 1.6 bits/trit exactly on whole blocks.
    CHECK(codec::packed_size_bits(5) == 8);
    for (std::uint64_t blocks = 1; blocks <= 64; blocks++)
    {
        CHECK(codec::packed_size_bits(5 * blocks) == 8 * blocks);
        // Correctly rounded 8n/5n lands on the same double as the literal.
        CHECK(static_cast<double>(codec::packed_size_bits(5 * blocks)) /
                        static_cast<double>(5 * blocks) == 1.6);
    }
}

TEST_CASE("pack_blocks pads the final partial block with zero trits")
{
    const std::vector<Trit> seven(7, 1);
    const auto blocks = codec::pack_blocks(seven);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0] == 242);
    CHECK(blocks[1] == 125); // {1, 1, 0, 0, 0} -> 2 + 6 + 9 + 27 + 81
    const auto back = codec::unpack_blocks(blocks, 7);
    CHECK(back == seven);
}

TEST_CASE("unpack_blocks validates the block count")
{
    const std::vector<std::uint8_t> blocks = {121, 121};
    CHECK_THROWS_AS(codec::unpack_blocks(blocks, 11), InvalidEncoding);
    CHECK_THROWS_AS(codec::unpack_blocks(blocks, 5), InvalidEncoding);
    CHECK(codec::unpack_blocks(blocks, 10).size() == 10);
}

TEST_CASE("round trip over random tensors")
{
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 50; trial++)
    {
        const auto h = 1 + rng() % 7;
        const auto w = 1 + rng() % 7;
        const auto c = 1 + rng() % 5;
        auto t = codec::TernaryTensor::zeros(h, w, c);
        for (auto &v : t.data)
        {
            v = static_cast<Trit>(static_cast<int>(rng() % 3) - 1);
        }
        const auto bytes = codec::serialize_ktt(t);
        CHECK(bytes.size() == 16 + codec::packed_size_bytes(t.numel()));
        const auto back = codec::parse_ktt(bytes);
        CHECK(back.height == t.height);
        CHECK(back.width == t.width);
        CHECK(back.channels == t.channels);
        CHECK(back.data == t.data);
    }
}

TEST_CASE("ktt container layout is frozen")
{
    auto t = codec::TernaryTensor::zeros(1, 1, 1);
    t.data[0] = 1;
    const auto bytes = codec::serialize_ktt(t);
    const std::vector<std::uint8_t> expected = {
            'K', 'T', 'T', '1',
            1, 0, 0, 0,
            1, 0, 0, 0,
            1, 0, 0, 0,
            122,
    };
    CHECK(bytes == expected);
}

TEST_CASE("parse_ktt rejects malformed containers")
{
    auto t = codec::TernaryTensor::zeros(2, 3, 1);
    auto bytes = codec::serialize_ktt(t);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(codec::parse_ktt(bad_magic), ParseError);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(codec::parse_ktt(truncated), ParseError);

    auto oversized = bytes;
    oversized.push_back(0);
    CHECK_THROWS_AS(codec::parse_ktt(oversized), ParseError);

    CHECK_THROWS_AS(codec::parse_ktt(std::vector<std::uint8_t>{'K', 'T'}),
            ParseError);
}

TEST_CASE("tensor validate")
{
    auto t = codec::TernaryTensor::zeros(2, 2, 2);
    CHECK_NOTHROW(t.validate());
    t.data[3] = 2;
    CHECK_THROWS_AS(t.validate(), SchemaViolation);
    t.data[3] = 0;
    t.data.pop_back();
    CHECK_THROWS_AS(t.validate(), InvalidDims);
}

TEST_SUITE_END();
