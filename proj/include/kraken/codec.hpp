#ifndef KRAKEN_CODEC_HPP
#define KRAKEN_CODEC_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kraken::codec {

// A single ternary digit, value in {-1, 0, +1}.
using Trit = std::int8_t;

inline constexpr std::size_t kTritsPerBlock = 5;
// Largest valid packed byte: all five digits at 2, i.e. 2*(1+3+9+27+81).
inline constexpr std::uint8_t kMaxPackedByte = 242;

constexpr bool is_trit(int v)
{
    return v >= -1 && v <= 1;
}

// Packs 5 trits into one byte as little-endian base-3 digits (trit+1).
// Bijective over all 3^5 = 243 inputs; density is 8/5 = 1.6 bits per trit.
std::uint8_t pack_trits(std::span<const Trit, kTritsPerBlock> trits);

// Exact inverse of pack_trits. Throws InvalidEncoding for bytes in [243, 255].
std::array<Trit, kTritsPerBlock> unpack_trits(std::uint8_t block);

// Trit-valued feature map or weight tensor, row-major (y, x, c).
struct TernaryTensor {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;
    std::vector<Trit> data;

    static TernaryTensor zeros(std::uint32_t h, std::uint32_t w, std::uint32_t c);

    std::size_t numel() const { return data.size(); }

    std::size_t index(std::uint32_t y, std::uint32_t x, std::uint32_t c) const
    {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }

    Trit at(std::uint32_t y, std::uint32_t x, std::uint32_t c) const
    {
        return data[index(y, x, c)];
    }

    Trit &at(std::uint32_t y, std::uint32_t x, std::uint32_t c)
    {
        return data[index(y, x, c)];
    }

    // Checks data length against dims and that every element is a trit.
    void validate() const;
};

// Packed size of a trit sequence: one byte per started group of 5.
std::uint64_t packed_size_bits(std::uint64_t numel);
std::uint64_t packed_size_bytes(std::uint64_t numel);

// Packs an arbitrary trit sequence into base-3 blocks. A partial final
// block is padded with trit 0, which never perturbs dot products.
std::vector<std::uint8_t> pack_blocks(std::span<const Trit> trits);

// Unpacks `numel` trits from packed blocks. Throws InvalidEncoding on a bad
// byte or when the block count does not match numel.
std::vector<Trit> unpack_blocks(std::span<const std::uint8_t> blocks, std::size_t numel);

// KTT1 container: 16-byte header (magic "KTT1", u32le height, width,
// channels) followed by the packed blocks.
std::vector<std::uint8_t> serialize_ktt(const TernaryTensor &t);
TernaryTensor parse_ktt(std::span<const std::uint8_t> bytes);

void write_ktt_file(const TernaryTensor &t, const std::string &path);
TernaryTensor read_ktt_file(const std::string &path);

} // namespace kraken::codec

#endif
