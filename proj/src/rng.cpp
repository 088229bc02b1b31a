#include "ivboot/rng.hpp"

namespace ivboot {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngStream RngStream::substream(std::initializer_list<std::uint64_t> path) const noexcept {
    std::uint64_t id = stream_id;
    for (std::uint64_t step : path) {
        id = mix64(id ^ mix64(step + 0x632BE59BD9B4E019ull));
    }
    return RngStream{master_seed, id};
}

RngEngine RngStream::engine() const {
    const std::uint64_t seed = mix64(master_seed ^ mix64(stream_id ^ 0xD1B54A32D192ED03ull));
    return RngEngine(seed);
}

} // namespace ivboot
