#pragma once

#include <cstdint>
#include <initializer_list>

#include <boost/random/mersenne_twister.hpp>

namespace ivboot {

using RngEngine = boost::random::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based random stream. A stream is fully described by the pair
// (master_seed, stream_id); engines built from equal pairs produce identical
// sequences regardless of which thread builds them.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    // Child stream addressed by a path of counters, e.g. {grid, rep, tag}.
    RngStream substream(std::initializer_list<std::uint64_t> path) const noexcept;
    RngStream substream(std::uint64_t index) const noexcept { return substream({index}); }

    RngEngine engine() const;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

// Purpose tags used when deriving substreams, so that e.g. sample draws and
// bootstrap weights of the same replication never share an engine.
namespace stream_tag {
inline constexpr std::uint64_t sample = 0x53414d50;
inline constexpr std::uint64_t bootstrap = 0x424f4f54;
inline constexpr std::uint64_t clr_table = 0x434c5254;
inline constexpr std::uint64_t lr_null = 0x4c524e55;
} // namespace stream_tag

} // namespace ivboot
