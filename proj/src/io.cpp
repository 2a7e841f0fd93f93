#include "kraken/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "kraken/errors.hpp"

namespace kraken::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string lower_ext(const std::string &path)
{
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
            [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

template <typename T>
T parse_uint_field(std::string_view field, std::size_t line_no, const char *name)
{
    T value{};
    const char *first = field.data();
    const char *last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty())
    {
        throw ParseError("events line " + std::to_string(line_no) + ": bad " +
                name + " field '" + std::string(field) + "'");
    }
    return value;
}

void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off)
{
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off)
{
    return static_cast<std::uint32_t>(b[off]) |
            (static_cast<std::uint32_t>(b[off + 1]) << 8) |
            (static_cast<std::uint32_t>(b[off + 2]) << 16) |
            (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

// Uniform helpers over the raw 32-bit engine output; std:: distributions
// are not portable bit-for-bit across standard libraries.
std::uint32_t rand_below(std::mt19937 &rng, std::uint32_t n)
{
    return rng() % n;
}

int rand_range(std::mt19937 &rng, int lo, int hi)
{
    return lo + static_cast<int>(rand_below(rng,
            static_cast<std::uint32_t>(hi - lo + 1)));
}

bool rand_bernoulli(std::mt19937 &rng, double p)
{
    const std::uint32_t draw = rng();
    if (p <= 0.0)
    {
        return false;
    }
    if (p >= 1.0)
    {
        return true;
    }
    return static_cast<double>(draw) < p * 4294967296.0;
}

codec::Trit rand_trit(std::mt19937 &rng)
{
    return static_cast<codec::Trit>(static_cast<int>(rand_below(rng, 3)) - 1);
}

} // namespace

std::vector<std::uint8_t> read_file_bytes(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParseError("cannot open '" + path + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
            std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::string &path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw ParseError("write to '" + path + "' failed");
    }
}

std::string read_file_text(const std::string &path)
{
    const auto bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_file_text(const std::string &path, const std::string &text)
{
    write_file_bytes(path, std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

std::uint32_t buffer_crc32(std::span<const std::uint8_t> bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < bytes.size())
    {
        const auto chunk = static_cast<uInt>(
                std::min<std::size_t>(bytes.size() - off, 1u << 30));
        crc = crc32(crc, bytes.data() + off, chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint32_t file_crc32(const std::string &path)
{
    const auto bytes = read_file_bytes(path);
    return buffer_crc32(bytes);
}

std::string events_to_csv(const sne::EventStream &events)
{
    std::string out;
    out.reserve(events.size() * 16);
    for (const auto &e : events)
    {
        out += std::to_string(e.tick);
        out += ',';
        out += std::to_string(e.x);
        out += ',';
        out += std::to_string(e.y);
        out += ',';
        out += std::to_string(e.c);
        out += '\n';
    }
    return out;
}

sne::EventStream events_from_csv(const std::string &text)
{
    sne::EventStream events;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos)
        {
            end = text.size();
        }
        line_no++;
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r')
        {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#')
        {
            continue;
        }

        std::array<std::string_view, 4> fields;
        std::size_t start = 0;
        std::size_t n = 0;
        while (true)
        {
            const std::size_t comma = line.find(',', start);
            const std::string_view part = comma == std::string_view::npos
                    ? line.substr(start)
                    : line.substr(start, comma - start);
            if (n < 4)
            {
                fields[n] = part;
            }
            n++;
            if (comma == std::string_view::npos)
            {
                break;
            }
            start = comma + 1;
        }
        if (n != 4)
        {
            throw ParseError("events line " + std::to_string(line_no) +
                    ": expected 'tick,x,y,c', got '" + std::string(line) + "'");
        }

        sne::Event e;
        e.tick = parse_uint_field<std::uint32_t>(fields[0], line_no, "tick");
        e.x = parse_uint_field<std::uint16_t>(fields[1], line_no, "x");
        e.y = parse_uint_field<std::uint16_t>(fields[2], line_no, "y");
        e.c = parse_uint_field<std::uint16_t>(fields[3], line_no, "c");
        events.push_back(e);
    }
    return events;
}

std::vector<std::uint8_t> serialize_kev(const sne::EventStream &events)
{
    std::vector<std::uint8_t> out;
    out.reserve(4 + events.size() * 10);
    out.insert(out.end(), {'K', 'E', 'V', '1'});
    for (const auto &e : events)
    {
        put_u32(out, e.tick);
        put_u16(out, e.x);
        put_u16(out, e.y);
        put_u16(out, e.c);
    }
    return out;
}

sne::EventStream parse_kev(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "KEV1", 4) != 0)
    {
        throw ParseError("event file: missing KEV1 magic");
    }
    const std::size_t payload = bytes.size() - 4;
    if (payload % 10 != 0)
    {
        throw ParseError("event file: truncated record (payload " +
                std::to_string(payload) + " bytes is not a multiple of 10)");
    }
    sne::EventStream events;
    events.reserve(payload / 10);
    for (std::size_t off = 4; off < bytes.size(); off += 10)
    {
        sne::Event e;
        e.tick = get_u32(bytes, off);
        e.x = get_u16(bytes, off + 4);
        e.y = get_u16(bytes, off + 6);
        e.c = get_u16(bytes, off + 8);
        events.push_back(e);
    }
    return events;
}

sne::EventStream load_events(const std::string &path, EventFormat format,
        bool allow_sort)
{
    const auto bytes = read_file_bytes(path);
    if (format == EventFormat::Auto)
    {
        const bool magic = bytes.size() >= 4 &&
                std::memcmp(bytes.data(), "KEV1", 4) == 0;
        format = magic ? EventFormat::Kev1 : EventFormat::Csv;
    }
    sne::EventStream events;
    if (format == EventFormat::Kev1)
    {
        events = parse_kev(bytes);
    }
    else
    {
        events = events_from_csv(std::string(bytes.begin(), bytes.end()));
    }
    if (!sne::is_tick_sorted(events))
    {
        if (!allow_sort)
        {
            throw UnsortedStream("'" + path + "' is not sorted by tick "
                    "(pass the sort flag to sort it on load)");
        }
        std::stable_sort(events.begin(), events.end(),
                [](const sne::Event &a, const sne::Event &b) {
                    return a.tick < b.tick;
                });
    }
    return events;
}

void save_events(const std::string &path, const sne::EventStream &events,
        EventFormat format)
{
    if (format == EventFormat::Auto)
    {
        const std::string ext = lower_ext(path);
        format = (ext == ".kev1" || ext == ".kev") ? EventFormat::Kev1
                                                   : EventFormat::Csv;
    }
    if (format == EventFormat::Kev1)
    {
        write_file_bytes(path, serialize_kev(events));
    }
    else
    {
        write_file_text(path, events_to_csv(events));
    }
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::span<const std::uint8_t> bytes, std::size_t &off)
{
    while (off < bytes.size())
    {
        const char c = static_cast<char>(bytes[off]);
        if (c == '#')
        {
            while (off < bytes.size() && bytes[off] != '\n')
            {
                off++;
            }
        }
        else if (std::isspace(static_cast<unsigned char>(c)))
        {
            off++;
        }
        else
        {
            break;
        }
    }
    const std::size_t start = off;
    while (off < bytes.size() &&
            !std::isspace(static_cast<unsigned char>(bytes[off])))
    {
        off++;
    }
    if (start == off)
    {
        throw ParseError("pgm: unexpected end of header");
    }
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start),
            bytes.begin() + static_cast<std::ptrdiff_t>(off));
}

std::uint32_t pgm_number(std::span<const std::uint8_t> bytes, std::size_t &off,
        const char *what)
{
    const std::string tok = pgm_token(bytes, off);
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
    {
        throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'");
    }
    return value;
}

codec::Trit tercile(std::uint32_t p)
{
    if (p > 170)
    {
        return 1;
    }
    if (p < 85)
    {
        return -1;
    }
    return 0;
}

} // namespace

codec::TernaryTensor parse_pgm_trits(std::span<const std::uint8_t> bytes)
{
    std::size_t off = 0;
    const std::string magic = pgm_token(bytes, off);
    if (magic != "P5" && magic != "P2")
    {
        throw ParseError("pgm: unsupported magic '" + magic + "'");
    }
    const std::uint32_t width = pgm_number(bytes, off, "width");
    const std::uint32_t height = pgm_number(bytes, off, "height");
    const std::uint32_t maxval = pgm_number(bytes, off, "maxval");
    if (width == 0 || height == 0)
    {
        throw ParseError("pgm: zero image dimension");
    }
    if (maxval == 0 || maxval > 255)
    {
        throw ParseError("pgm: unsupported maxval " + std::to_string(maxval));
    }

    auto t = codec::TernaryTensor::zeros(height, width, 1);
    const std::size_t numel = static_cast<std::size_t>(width) * height;
    if (magic == "P5")
    {
        off++; // single whitespace byte after maxval
        if (off >= bytes.size() || bytes.size() - off < numel)
        {
            throw ParseError("pgm: pixel data truncated");
        }
        for (std::size_t i = 0; i < numel; i++)
        {
            t.data[i] = tercile(bytes[off + i]);
        }
    }
    else
    {
        for (std::size_t i = 0; i < numel; i++)
        {
            const std::uint32_t p = pgm_number(bytes, off, "pixel");
            if (p > maxval)
            {
                throw ParseError("pgm: pixel " + std::to_string(p) +
                        " above maxval");
            }
            t.data[i] = tercile(p);
        }
    }
    return t;
}

codec::TernaryTensor load_pgm_trits(const std::string &path)
{
    return parse_pgm_trits(read_file_bytes(path));
}

std::string trits_to_text(const codec::TernaryTensor &t)
{
    std::string out = std::to_string(t.height) + " " + std::to_string(t.width) +
            " " + std::to_string(t.channels) + "\n";
    const std::size_t per_line = static_cast<std::size_t>(t.width) * t.channels;
    for (std::size_t i = 0; i < t.data.size(); i++)
    {
        out += std::to_string(static_cast<int>(t.data[i]));
        out += (per_line != 0 && (i + 1) % per_line == 0) ? '\n' : ' ';
    }
    if (!out.empty() && out.back() == ' ')
    {
        out.back() = '\n';
    }
    return out;
}

codec::TernaryTensor trits_from_text(const std::string &text)
{
    std::istringstream in(text);
    std::uint32_t h = 0;
    std::uint32_t w = 0;
    std::uint32_t c = 0;
    if (!(in >> h >> w >> c))
    {
        throw ParseError("trit text: bad 'height width channels' header");
    }
    auto t = codec::TernaryTensor::zeros(h, w, c);
    for (std::size_t i = 0; i < t.data.size(); i++)
    {
        int v = 0;
        if (!(in >> v))
        {
            throw ParseError("trit text: expected " +
                    std::to_string(t.data.size()) + " values, got " +
                    std::to_string(i));
        }
        if (!codec::is_trit(v))
        {
            throw ParseError("trit text: value " + std::to_string(v) +
                    " at index " + std::to_string(i) + " is not a trit");
        }
        t.data[i] = static_cast<codec::Trit>(v);
    }
    std::string tail;
    if (in >> tail)
    {
        throw ParseError("trit text: trailing data '" + tail + "'");
    }
    return t;
}

codec::TernaryTensor load_trit_text(const std::string &path)
{
    return trits_from_text(read_file_text(path));
}

void save_trit_text(const std::string &path, const codec::TernaryTensor &t)
{
    write_file_text(path, trits_to_text(t));
}

codec::TernaryTensor load_tensor(const std::string &path)
{
    const std::string ext = lower_ext(path);
    if (ext == ".ktt")
    {
        return codec::read_ktt_file(path);
    }
    if (ext == ".pgm")
    {
        return load_pgm_trits(path);
    }
    if (ext == ".txt")
    {
        return load_trit_text(path);
    }
    throw ParseError("cannot infer tensor format from '" + path +
            "' (expected .ktt, .pgm or .txt)");
}

namespace {

json parse_json_file(const std::string &path)
{
    const std::string text = read_file_text(path);
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError("'" + path + "': " + e.what());
    }
}

int require_int(const json &j, const char *key, const std::string &where)
{
    if (!j.contains(key) || !j[key].is_number_integer())
    {
        throw SchemaViolation(where + ": missing integer field '" + key + "'");
    }
    return j[key].get<int>();
}

std::uint16_t require_u16(const json &j, const char *key, const std::string &where)
{
    const int v = require_int(j, key, where);
    if (v < 0 || v > 0xffff)
    {
        throw SchemaViolation(where + ": field '" + key + "' = " +
                std::to_string(v) + " out of range");
    }
    return static_cast<std::uint16_t>(v);
}

sne::SneNetwork sne_from_json(const json &doc, const std::string &path)
{
    if (!doc.contains("layers") || !doc["layers"].is_array() ||
            doc["layers"].empty())
    {
        throw SchemaViolation("'" + path + "': missing non-empty 'layers' array");
    }
    sne::SneNetwork net;
    std::size_t idx = 0;
    for (const auto &j : doc["layers"])
    {
        const std::string where = "'" + path + "' layer " + std::to_string(idx);
        sne::LifConfig cfg;
        const int thr = require_int(j, "threshold", where);
        if (thr < 1 || thr > 127)
        {
            throw SchemaViolation(where + ": threshold " + std::to_string(thr) +
                    " outside [1, 127]");
        }
        cfg.threshold = static_cast<std::int8_t>(thr);
        const int num = require_int(j, "leak_num", where);
        const int shift = require_int(j, "leak_shift", where);
        if (num < 0 || num > 255 || shift < 0 || shift > 8)
        {
            throw SchemaViolation(where + ": leak " + std::to_string(num) +
                    "/2^" + std::to_string(shift) + " out of range");
        }
        cfg.leak_num = static_cast<std::uint8_t>(num);
        cfg.leak_shift = static_cast<std::uint8_t>(shift);

        sne::LifLayer layer(require_u16(j, "height", where),
                require_u16(j, "width", where),
                require_u16(j, "in_channels", where),
                require_u16(j, "out_channels", where), cfg);

        if (!j.contains("weights") || !j["weights"].is_array())
        {
            throw SchemaViolation(where + ": missing 'weights' array");
        }
        const auto &w = j["weights"];
        if (w.size() != layer.weights.size())
        {
            throw SchemaViolation(where + ": expected " +
                    std::to_string(layer.weights.size()) + " weights, got " +
                    std::to_string(w.size()));
        }
        for (std::size_t i = 0; i < w.size(); i++)
        {
            if (!w[i].is_number_integer())
            {
                throw SchemaViolation(where + ": weight " + std::to_string(i) +
                        " is not an integer");
            }
            const int v = w[i].get<int>();
            if (v < -8 || v > 7)
            {
                throw SchemaViolation(where + ": weight " + std::to_string(v) +
                        " outside [-8, 7]");
            }
            layer.weights[i] = static_cast<std::int8_t>(v);
        }
        net.layers.push_back(std::move(layer));
        idx++;
    }
    return net;
}

cutie::Pool pool_from_string(const std::string &s, const std::string &where)
{
    if (s == "none")
    {
        return cutie::Pool::None;
    }
    if (s == "max2")
    {
        return cutie::Pool::Max2;
    }
    throw SchemaViolation(where + ": unknown pool '" + s + "'");
}

std::vector<std::int32_t> thresholds_from_json(const json &j, const char *key,
        std::uint16_t c_out, const std::string &where)
{
    if (!j.contains(key))
    {
        return std::vector<std::int32_t>(c_out, 0);
    }
    const auto &t = j[key];
    if (t.is_number_integer())
    {
        return std::vector<std::int32_t>(c_out, t.get<std::int32_t>());
    }
    if (t.is_array())
    {
        if (t.size() != c_out)
        {
            throw SchemaViolation(where + ": '" + key + "' has " +
                    std::to_string(t.size()) + " entries for " +
                    std::to_string(c_out) + " output channels");
        }
        std::vector<std::int32_t> out(c_out);
        for (std::size_t i = 0; i < t.size(); i++)
        {
            if (!t[i].is_number_integer())
            {
                throw SchemaViolation(where + ": '" + key + "' entry " +
                        std::to_string(i) + " is not an integer");
            }
            out[i] = t[i].get<std::int32_t>();
        }
        return out;
    }
    throw SchemaViolation(where + ": '" + key +
            "' must be an integer or an array");
}

std::vector<codec::Trit> layer_trits_from_json(const json &j,
        const cutie::TernaryConvLayer &layer, const std::string &where,
        const fs::path &base_dir)
{
    if (!j.contains("weights") || !j["weights"].is_object())
    {
        throw SchemaViolation(where + ": missing 'weights' object");
    }
    const auto &w = j["weights"];
    const std::size_t numel = layer.weight_numel();

    if (w.contains("trits"))
    {
        const auto &arr = w["trits"];
        if (!arr.is_array() || arr.size() != numel)
        {
            throw SchemaViolation(where + ": inline trits must be an array of " +
                    std::to_string(numel) + " values");
        }
        std::vector<codec::Trit> trits(numel);
        for (std::size_t i = 0; i < numel; i++)
        {
            if (!arr[i].is_number_integer() || !codec::is_trit(arr[i].get<int>()))
            {
                throw SchemaViolation(where + ": inline trit " +
                        std::to_string(i) + " is not in {-1, 0, 1}");
            }
            trits[i] = static_cast<codec::Trit>(arr[i].get<int>());
        }
        return trits;
    }

    if (!w.contains("file") || !w["file"].is_string())
    {
        throw SchemaViolation(where +
                ": weights need either 'trits' or 'file' + 'crc32'");
    }
    if (!w.contains("crc32") || !w["crc32"].is_number_unsigned())
    {
        throw SchemaViolation(where + ": payload reference is missing 'crc32'");
    }
    const fs::path payload = base_dir / w["file"].get<std::string>();
    const auto bytes = read_file_bytes(payload.string());
    const auto crc = buffer_crc32(bytes);
    if (crc != w["crc32"].get<std::uint32_t>())
    {
        throw ParseError(where + ": payload '" + payload.string() +
                "' crc32 " + std::to_string(crc) + " does not match declared " +
                std::to_string(w["crc32"].get<std::uint32_t>()));
    }
    codec::TernaryTensor t = codec::parse_ktt(bytes);
    if (t.height != layer.c_out || t.width != layer.c_in ||
            t.channels != static_cast<std::uint32_t>(layer.k) * layer.k)
    {
        throw SchemaViolation(where + ": payload dims " +
                std::to_string(t.height) + "x" + std::to_string(t.width) + "x" +
                std::to_string(t.channels) + " do not match c_out x c_in x k^2");
    }
    return std::move(t.data);
}

cutie::CutieNetwork cutie_from_json(const json &doc, const std::string &path)
{
    cutie::CutieNetwork net;
    if (!doc.contains("input") || !doc["input"].is_object())
    {
        throw SchemaViolation("'" + path + "': missing 'input' dims object");
    }
    const auto &input = doc["input"];
    net.input_height = require_u16(input, "height", "'" + path + "' input");
    net.input_width = require_u16(input, "width", "'" + path + "' input");
    net.input_channels = require_u16(input, "channels", "'" + path + "' input");

    if (!doc.contains("layers") || !doc["layers"].is_array() ||
            doc["layers"].empty())
    {
        throw SchemaViolation("'" + path + "': missing non-empty 'layers' array");
    }
    const fs::path base_dir = fs::path(path).parent_path();
    std::size_t idx = 0;
    for (const auto &j : doc["layers"])
    {
        const std::string where = "'" + path + "' layer " + std::to_string(idx);
        cutie::TernaryConvLayer layer;
        layer.k = require_u16(j, "kernel", where);
        layer.c_in = require_u16(j, "in_channels", where);
        layer.c_out = require_u16(j, "out_channels", where);
        if (layer.c_in > cutie::kMaxChannels || layer.c_out > cutie::kMaxChannels)
        {
            throw SchemaViolation(where + ": " +
                    std::to_string(std::max(layer.c_in, layer.c_out)) +
                    " channels exceed the " +
                    std::to_string(cutie::kMaxChannels) + "-channel datapath");
        }
        layer.pool = pool_from_string(j.value("pool", std::string("none")), where);
        layer.is_final = j.value("final", false);
        layer.threshold_lo =
                thresholds_from_json(j, "threshold_lo", layer.c_out, where);
        layer.threshold_hi =
                thresholds_from_json(j, "threshold_hi", layer.c_out, where);
        layer.weights = layer_trits_from_json(j, layer, where, base_dir);
        net.layers.push_back(std::move(layer));
        idx++;
    }
    return net;
}

pulp::ConvPatchSpec patch_from_json(const json &doc, const std::string &path)
{
    if (!doc.contains("patch") || !doc["patch"].is_object())
    {
        throw SchemaViolation("'" + path + "': missing 'patch' object");
    }
    const auto &j = doc["patch"];
    const std::string where = "'" + path + "' patch";
    pulp::ConvPatchSpec spec;
    spec.n_out = static_cast<std::uint32_t>(require_int(j, "n_out", where));
    spec.c_in = static_cast<std::uint32_t>(require_int(j, "c_in", where));
    spec.c_out = static_cast<std::uint32_t>(require_int(j, "c_out", where));
    spec.k = static_cast<std::uint32_t>(require_int(j, "k", where));
    spec.a_bits = require_int(j, "a_bits", where);
    spec.w_bits = require_int(j, "w_bits", where);
    return spec;
}

} // namespace

LoadedNetwork load_network(const std::string &path)
{
    const json doc = parse_json_file(path);
    if (!doc.is_object())
    {
        throw SchemaViolation("'" + path + "': top level is not an object");
    }
    if (doc.value("schema_version", 0) != 1)
    {
        throw SchemaViolation("'" + path + "': unsupported schema_version");
    }
    if (!doc.contains("engine") || !doc["engine"].is_string())
    {
        throw SchemaViolation("'" + path + "': missing 'engine' tag");
    }

    LoadedNetwork loaded;
    loaded.engine = doc["engine"].get<std::string>();
    loaded.name = doc.value("name", std::string());

    try
    {
        if (loaded.engine == "sne")
        {
            auto net = sne_from_json(doc, path);
            net.validate();
            loaded.net = std::move(net);
        }
        else if (loaded.engine == "cutie")
        {
            auto net = cutie_from_json(doc, path);
            net.validate();
            loaded.net = std::move(net);
        }
        else if (loaded.engine == "pulp-patch")
        {
            auto spec = patch_from_json(doc, path);
            spec.validate();
            loaded.net = spec;
        }
        else
        {
            throw SchemaViolation("'" + path + "': unknown engine '" +
                    loaded.engine + "'");
        }
    }
    catch (const UnsupportedShape &e)
    {
        // Shape limits of the datapath are schema violations when they come
        // from a description file.
        throw SchemaViolation("'" + path + "': " + e.what());
    }
    return loaded;
}

void save_sne_network(const std::string &path, const sne::SneNetwork &net,
        const std::string &name)
{
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["engine"] = "sne";
    doc["name"] = name;
    doc["layers"] = ordered_json::array();
    for (const auto &layer : net.layers)
    {
        ordered_json j;
        j["height"] = layer.height;
        j["width"] = layer.width;
        j["in_channels"] = layer.c_in;
        j["out_channels"] = layer.c_out;
        j["threshold"] = layer.config.threshold;
        j["leak_num"] = layer.config.leak_num;
        j["leak_shift"] = layer.config.leak_shift;
        j["weights"] = ordered_json::array();
        for (const std::int8_t w : layer.weights)
        {
            j["weights"].push_back(static_cast<int>(w));
        }
        doc["layers"].push_back(std::move(j));
    }
    write_file_text(path, doc.dump(2) + "\n");
}

void save_cutie_network(const std::string &path, const cutie::CutieNetwork &net,
        const std::string &name, bool inline_weights)
{
    const fs::path p(path);
    const fs::path dir = p.parent_path();
    const std::string stem = p.stem().string();

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["engine"] = "cutie";
    doc["name"] = name;
    doc["input"]["height"] = net.input_height;
    doc["input"]["width"] = net.input_width;
    doc["input"]["channels"] = net.input_channels;
    doc["layers"] = ordered_json::array();
    for (std::size_t l = 0; l < net.layers.size(); l++)
    {
        const auto &layer = net.layers[l];
        ordered_json j;
        j["kernel"] = layer.k;
        j["in_channels"] = layer.c_in;
        j["out_channels"] = layer.c_out;
        j["pool"] = layer.pool == cutie::Pool::Max2 ? "max2" : "none";
        j["final"] = layer.is_final;
        j["threshold_lo"] = layer.threshold_lo;
        j["threshold_hi"] = layer.threshold_hi;
        if (inline_weights)
        {
            j["weights"]["trits"] = ordered_json::array();
            for (const codec::Trit t : layer.weights)
            {
                j["weights"]["trits"].push_back(static_cast<int>(t));
            }
        }
        else
        {
            codec::TernaryTensor t;
            t.height = layer.c_out;
            t.width = layer.c_in;
            t.channels = static_cast<std::uint32_t>(layer.k) * layer.k;
            t.data = layer.weights;
            const std::string payload_name =
                    stem + "_l" + std::to_string(l) + ".ktt";
            const auto bytes = codec::serialize_ktt(t);
            write_file_bytes((dir / payload_name).string(), bytes);
            j["weights"]["file"] = payload_name;
            j["weights"]["crc32"] = buffer_crc32(bytes);
        }
        doc["layers"].push_back(std::move(j));
    }
    write_file_text(path, doc.dump(2) + "\n");
}

void save_patch(const std::string &path, const pulp::ConvPatchSpec &patch,
        const std::string &name)
{
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["engine"] = "pulp-patch";
    doc["name"] = name;
    doc["patch"]["n_out"] = patch.n_out;
    doc["patch"]["c_in"] = patch.c_in;
    doc["patch"]["c_out"] = patch.c_out;
    doc["patch"]["k"] = patch.k;
    doc["patch"]["a_bits"] = patch.a_bits;
    doc["patch"]["w_bits"] = patch.w_bits;
    write_file_text(path, doc.dump(2) + "\n");
}

GeneratedSne gen_sne(const SneGenParams &params, std::uint64_t seed)
{
    if (params.height == 0 || params.width == 0 || params.c_in == 0 ||
            params.c_out == 0 || params.layers < 1 || params.ticks == 0)
    {
        throw InvalidDims("generator dims must all be positive");
    }
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));

    GeneratedSne out;
    for (int l = 0; l < params.layers; l++)
    {
        sne::LifConfig cfg;
        cfg.threshold = static_cast<std::int8_t>(rand_range(rng, 1, 4));
        cfg.leak_shift = static_cast<std::uint8_t>(rand_range(rng, 0, 8));
        const int full = 1 << cfg.leak_shift;
        cfg.leak_num = static_cast<std::uint8_t>(
                rand_range(rng, (full + 1) / 2, full));
        const std::uint16_t cin = l == 0 ? params.c_in : params.c_out;
        sne::LifLayer layer(params.height, params.width, cin, params.c_out, cfg);
        for (auto &w : layer.weights)
        {
            w = static_cast<std::int8_t>(rand_range(rng, -8, 7));
        }
        out.net.layers.push_back(std::move(layer));
    }

    for (std::uint32_t tick = 0; tick < params.ticks; tick++)
    {
        for (std::uint16_t y = 0; y < params.height; y++)
        {
            for (std::uint16_t x = 0; x < params.width; x++)
            {
                for (std::uint16_t c = 0; c < params.c_in; c++)
                {
                    if (rand_bernoulli(rng, params.density))
                    {
                        out.events.push_back({tick, x, y, c});
                    }
                }
            }
        }
    }
    return out;
}

namespace {

struct CutieStagePlan {
    std::uint16_t k;
    std::uint16_t c_out;
    cutie::Pool pool;
    bool is_final;
};

GeneratedCutie gen_cutie_plan(std::uint32_t h, std::uint32_t w, std::uint32_t c,
        std::span<const CutieStagePlan> plan, std::uint64_t seed)
{
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    GeneratedCutie out;
    out.net.input_height = h;
    out.net.input_width = w;
    out.net.input_channels = c;

    std::uint16_t c_in = static_cast<std::uint16_t>(c);
    for (const auto &stage : plan)
    {
        cutie::TernaryConvLayer layer;
        layer.k = stage.k;
        layer.c_in = c_in;
        layer.c_out = stage.c_out;
        layer.pool = stage.pool;
        layer.is_final = stage.is_final;
        layer.weights.resize(layer.weight_numel());
        for (auto &t : layer.weights)
        {
            t = rand_trit(rng);
        }
        layer.threshold_lo.resize(layer.c_out);
        layer.threshold_hi.resize(layer.c_out);
        const int spread = 2 * static_cast<int>(c_in);
        for (std::uint16_t co = 0; co < layer.c_out; co++)
        {
            layer.threshold_lo[co] = -rand_range(rng, 0, spread);
            layer.threshold_hi[co] = rand_range(rng, 0, spread);
        }
        out.net.layers.push_back(std::move(layer));
        c_in = stage.c_out;
    }

    out.input = codec::TernaryTensor::zeros(h, w, c);
    for (auto &t : out.input.data)
    {
        t = rand_trit(rng);
    }
    return out;
}

} // namespace

GeneratedCutie gen_cutie_cifar10(std::uint64_t seed)
{
    // 2048 + 512 + 128 + 16 = 2704 cycles before per-layer overhead.
    static constexpr CutieStagePlan kPlan[] = {
            {3, 48, cutie::Pool::None, false},
            {3, 48, cutie::Pool::Max2, false},
            {3, 96, cutie::Pool::None, false},
            {3, 96, cutie::Pool::Max2, false},
            {3, 96, cutie::Pool::None, false},
            {3, 96, cutie::Pool::Max2, false},
            {1, 10, cutie::Pool::None, true},
    };
    return gen_cutie_plan(32, 32, 3, kPlan, seed);
}

GeneratedCutie gen_cutie_small(std::uint64_t seed)
{
    static constexpr CutieStagePlan kPlan[] = {
            {3, 8, cutie::Pool::Max2, false},
            {3, 12, cutie::Pool::None, false},
            {1, 4, cutie::Pool::None, true},
    };
    return gen_cutie_plan(8, 8, 3, kPlan, seed);
}

pulp::ConvPatchSpec gen_patch(std::uint64_t seed)
{
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    static constexpr int kBits[] = {8, 4, 2};
    pulp::ConvPatchSpec spec;
    spec.n_out = static_cast<std::uint32_t>(16 << rand_below(rng, 5));
    spec.c_in = static_cast<std::uint32_t>(8 << rand_below(rng, 3));
    spec.c_out = static_cast<std::uint32_t>(16 << rand_below(rng, 3));
    spec.k = rand_below(rng, 2) == 0 ? 1 : 3;
    spec.a_bits = kBits[rand_below(rng, 3)];
    spec.w_bits = kBits[rand_below(rng, 3)];
    return spec;
}

} // namespace kraken::io
