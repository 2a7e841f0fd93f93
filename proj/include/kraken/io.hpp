#ifndef KRAKEN_IO_HPP
#define KRAKEN_IO_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kraken/codec.hpp"
#include "kraken/cutie.hpp"
#include "kraken/pulp.hpp"
#include "kraken/sne.hpp"

namespace kraken::io {

std::vector<std::uint8_t> read_file_bytes(const std::string &path);
void write_file_bytes(const std::string &path, std::span<const std::uint8_t> bytes);
std::string read_file_text(const std::string &path);
void write_file_text(const std::string &path, const std::string &text);

std::uint32_t buffer_crc32(std::span<const std::uint8_t> bytes);
std::uint32_t file_crc32(const std::string &path);

// ---- event streams ----
// Text form: one `tick,x,y,c` line per event, '#' comment lines allowed.
// Binary form: magic "KEV1" then 10-byte little-endian records
// {u32 tick, u16 x, u16 y, u16 c}. DVS polarity rides in the channel field
// as c in {0, 1} by convention.

enum class EventFormat {
    Auto, // sniff the magic on load, pick by extension on save
    Csv,
    Kev1,
};

std::string events_to_csv(const sne::EventStream &events);
sne::EventStream events_from_csv(const std::string &text);
std::vector<std::uint8_t> serialize_kev(const sne::EventStream &events);
sne::EventStream parse_kev(std::span<const std::uint8_t> bytes);

// Returns a tick-sorted stream. An unsorted file throws UnsortedStream
// unless allow_sort, which applies a stable sort (same-tick order is
// meaningful: saturating adds are applied in stream order).
sne::EventStream load_events(const std::string &path,
        EventFormat format = EventFormat::Auto, bool allow_sort = false);
void save_events(const std::string &path, const sne::EventStream &events,
        EventFormat format = EventFormat::Auto);

// ---- ternary tensors ----

// 8-bit PGM (P5 or P2), tercile-mapped: p > 170 -> +1, p < 85 -> -1, else 0.
codec::TernaryTensor parse_pgm_trits(std::span<const std::uint8_t> bytes);
codec::TernaryTensor load_pgm_trits(const std::string &path);

// Plain text: a "height width channels" line then numel trit values.
std::string trits_to_text(const codec::TernaryTensor &t);
codec::TernaryTensor trits_from_text(const std::string &text);
codec::TernaryTensor load_trit_text(const std::string &path);
void save_trit_text(const std::string &path, const codec::TernaryTensor &t);

// Dispatch by extension: .ktt, .pgm, .txt.
codec::TernaryTensor load_tensor(const std::string &path);

// ---- network descriptions ----
// Structured-text network file with schema_version, engine tag and layer
// list; ternary weight payloads either inline or in KTT files referenced by
// relative path plus crc32.

struct LoadedNetwork {
    std::string name;
    std::string engine; // sne | cutie | pulp-patch
    std::variant<sne::SneNetwork, cutie::CutieNetwork, pulp::ConvPatchSpec> net;
};

LoadedNetwork load_network(const std::string &path);

void save_sne_network(const std::string &path, const sne::SneNetwork &net,
        const std::string &name);
// With inline_weights the trits go into the file; otherwise one
// "<stem>_l<i>.ktt" payload per layer is written next to it.
void save_cutie_network(const std::string &path, const cutie::CutieNetwork &net,
        const std::string &name, bool inline_weights);
void save_patch(const std::string &path, const pulp::ConvPatchSpec &patch,
        const std::string &name);

// ---- deterministic synthetic workloads ----

struct SneGenParams {
    std::uint16_t height = 32;
    std::uint16_t width = 32;
    std::uint16_t c_in = 2;
    std::uint16_t c_out = 4;
    int layers = 1;
    std::uint32_t ticks = 100;
    // Per-site event probability per tick; expected stream activity.
    double density = 0.01;
};

struct GeneratedSne {
    sne::SneNetwork net;
    sne::EventStream events;
};

GeneratedSne gen_sne(const SneGenParams &params, std::uint64_t seed);

struct GeneratedCutie {
    cutie::CutieNetwork net;
    codec::TernaryTensor input;
};

// Desk-scale stand-in for the 32x32 image-classification topology: six 3x3
// stages up to 96 channels with three pooling steps, then a 1x1 classifier.
GeneratedCutie gen_cutie_cifar10(std::uint64_t seed);
// Tiny random network for quick runs and tests.
GeneratedCutie gen_cutie_small(std::uint64_t seed);

pulp::ConvPatchSpec gen_patch(std::uint64_t seed);

} // namespace kraken::io

#endif
