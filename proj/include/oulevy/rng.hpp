#pragma once

#include <cstdint>
#include <limits>

namespace oulevy {

// PCG64 (XSL-RR 128/64).  Chosen over std::mt19937_64 because the stream
// parameter gives each simulated path an independent generator derived only
// from (master seed, stream id); outputs are then identical for any worker
// count or scheduling order.
class Pcg64 {
  public:
    using result_type = std::uint64_t;

    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        state_ = 0;
        inc_ = (static_cast<u128>(stream) << 1) | 1u;
        next();
        state_ += seed;
        next();
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() { return next(); }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  private:
    using u128 = unsigned __int128;

    static constexpr u128 mult_ =
        (static_cast<u128>(0x2360ed051fc65da4ull) << 64) | 0x4385df649fccf645ull;

    u128 state_;
    u128 inc_;

    std::uint64_t next() {
        state_ = state_ * mult_ + inc_;
        std::uint64_t hi = static_cast<std::uint64_t>(state_ >> 64);
        std::uint64_t lo = static_cast<std::uint64_t>(state_);
        std::uint64_t xored = hi ^ lo;
        unsigned rot = static_cast<unsigned>(state_ >> 122);
        return (xored >> rot) | (xored << ((64u - rot) & 63u));
    }
};

// Stream ids: the high 32 bits name a purpose domain, the low 32 bits index
// paths within it.  Keeps streams disjoint across subcommands and paths.
inline std::uint64_t stream_id(std::uint32_t domain, std::uint32_t index) {
    return (static_cast<std::uint64_t>(domain) << 32) | index;
}

}  // namespace oulevy
