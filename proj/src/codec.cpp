#include "kraken/codec.hpp"

#include <cstring>
#include <fstream>

#include "kraken/errors.hpp"

namespace kraken::codec {

namespace {

constexpr char kKttMagic[4] = {'K', 'T', 'T', '1'};

void put_u32le(std::vector<std::uint8_t> &out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    return static_cast<std::uint32_t>(bytes[offset]) |
            (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
            (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
            (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

} // namespace

std::uint8_t pack_trits(std::span<const Trit, kTritsPerBlock> trits)
{
    unsigned byte = 0;
    unsigned weight = 1;
    for (std::size_t i = 0; i < kTritsPerBlock; i++)
    {
        const int digit = trits[i] + 1; // {-1,0,+1} -> {0,1,2}
        byte += static_cast<unsigned>(digit) * weight;
        weight *= 3;
    }
    return static_cast<std::uint8_t>(byte);
}

std::array<Trit, kTritsPerBlock> unpack_trits(std::uint8_t block)
{
    if (block > kMaxPackedByte)
    {
        throw InvalidEncoding("packed byte " + std::to_string(block) +
                " exceeds maximum base-3 encoding " + std::to_string(kMaxPackedByte));
    }
    std::array<Trit, kTritsPerBlock> trits{};
    unsigned rest = block;
    for (std::size_t i = 0; i < kTritsPerBlock; i++)
    {
        trits[i] = static_cast<Trit>(static_cast<int>(rest % 3) - 1);
        rest /= 3;
    }
    return trits;
}

TernaryTensor TernaryTensor::zeros(std::uint32_t h, std::uint32_t w, std::uint32_t c)
{
    TernaryTensor t;
    t.height = h;
    t.width = w;
    t.channels = c;
    t.data.assign(static_cast<std::size_t>(h) * w * c, 0);
    return t;
}

void TernaryTensor::validate() const
{
    const std::size_t expected =
            static_cast<std::size_t>(height) * width * channels;
    if (data.size() != expected)
    {
        throw InvalidDims("tensor data length " + std::to_string(data.size()) +
                " does not match dims " + std::to_string(height) + "x" +
                std::to_string(width) + "x" + std::to_string(channels));
    }
    for (const Trit v : data)
    {
        if (!is_trit(v))
        {
            throw SchemaViolation("tensor element " + std::to_string(v) +
                    " is not a trit");
        }
    }
}

std::uint64_t packed_size_bytes(std::uint64_t numel)
{
    return (numel + kTritsPerBlock - 1) / kTritsPerBlock;
}

std::uint64_t packed_size_bits(std::uint64_t numel)
{
    return 8 * packed_size_bytes(numel);
}

std::vector<std::uint8_t> pack_blocks(std::span<const Trit> trits)
{
    std::vector<std::uint8_t> out;
    out.reserve(packed_size_bytes(trits.size()));
    std::array<Trit, kTritsPerBlock> group{};
    for (std::size_t base = 0; base < trits.size(); base += kTritsPerBlock)
    {
        group.fill(0);
        const std::size_t n = std::min(kTritsPerBlock, trits.size() - base);
        for (std::size_t i = 0; i < n; i++)
        {
            group[i] = trits[base + i];
        }
        out.push_back(pack_trits(group));
    }
    return out;
}

std::vector<Trit> unpack_blocks(std::span<const std::uint8_t> blocks, std::size_t numel)
{
    if (blocks.size() != packed_size_bytes(numel))
    {
        throw InvalidEncoding("packed payload holds " + std::to_string(blocks.size()) +
                " blocks, expected " + std::to_string(packed_size_bytes(numel)) +
                " for " + std::to_string(numel) + " trits");
    }
    std::vector<Trit> out;
    out.reserve(numel);
    for (std::size_t b = 0; b < blocks.size(); b++)
    {
        const auto group = unpack_trits(blocks[b]);
        const std::size_t n = std::min(kTritsPerBlock, numel - out.size());
        out.insert(out.end(), group.begin(), group.begin() + n);
    }
    return out;
}

std::vector<std::uint8_t> serialize_ktt(const TernaryTensor &t)
{
    t.validate();
    std::vector<std::uint8_t> out;
    out.reserve(16 + packed_size_bytes(t.numel()));
    out.insert(out.end(), kKttMagic, kKttMagic + 4);
    put_u32le(out, t.height);
    put_u32le(out, t.width);
    put_u32le(out, t.channels);
    const auto blocks = pack_blocks(t.data);
    out.insert(out.end(), blocks.begin(), blocks.end());
    return out;
}

TernaryTensor parse_ktt(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kKttMagic, 4) != 0)
    {
        throw ParseError("not a KTT1 container (missing magic or truncated header)");
    }
    TernaryTensor t;
    t.height = get_u32le(bytes, 4);
    t.width = get_u32le(bytes, 8);
    t.channels = get_u32le(bytes, 12);
    const std::size_t numel =
            static_cast<std::size_t>(t.height) * t.width * t.channels;
    const std::size_t payload = bytes.size() - 16;
    if (payload != packed_size_bytes(numel))
    {
        throw ParseError("KTT1 payload is " + std::to_string(payload) +
                " bytes, expected " + std::to_string(packed_size_bytes(numel)));
    }
    t.data = unpack_blocks(bytes.subspan(16), numel);
    return t;
}

void write_ktt_file(const TernaryTensor &t, const std::string &path)
{
    const auto bytes = serialize_ktt(t);
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParseError("cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw ParseError("short write to " + path);
    }
}

TernaryTensor read_ktt_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParseError("cannot open " + path);
    }
    std::vector<std::uint8_t> bytes(
            (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_ktt(bytes);
}

} // namespace kraken::codec
