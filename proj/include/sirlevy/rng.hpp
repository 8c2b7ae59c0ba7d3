#pragma once

#include <cstdint>
#include <random>

namespace sirlevy {

/// splitmix64 step: scrambles a 64-bit counter into a well-mixed value.
/// Used solely to derive engine seeds; successive or nearby inputs give
/// unrelated outputs, so seed0, seed0+1, ... are safe ensemble roots.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d4d4a9c4ceb9feULL;
    return x ^ (x >> 31);
}

/// One generator per noise source, all derived from a single root seed.
/// Keeping the Brownian components, the jump clock and the jump marks on
/// separate engines makes paths reproducible independently of how many
/// draws each source happens to consume (e.g. with or without atoms, or
/// with the auxiliary bound process switched on).
class RngStreams {
public:
    explicit RngStreams(std::uint64_t root_seed)
        : root_(root_seed),
          gauss_s_(derive(root_seed, 1)),
          gauss_i_(derive(root_seed, 2)),
          gauss_d_(derive(root_seed, 3)),
          gauss_psi_(derive(root_seed, 4)),
          jump_clock_(derive(root_seed, 5)),
          jump_mark_(derive(root_seed, 6)) {}

    std::uint64_t root() const { return root_; }

    std::mt19937_64& gauss_s() { return gauss_s_; }
    std::mt19937_64& gauss_i() { return gauss_i_; }
    std::mt19937_64& gauss_d() { return gauss_d_; }
    std::mt19937_64& gauss_psi() { return gauss_psi_; }
    std::mt19937_64& jump_clock() { return jump_clock_; }
    std::mt19937_64& jump_mark() { return jump_mark_; }

private:
    static std::uint64_t derive(std::uint64_t root, std::uint64_t stream) {
        return splitmix64(root ^ splitmix64(stream));
    }

    std::uint64_t root_;
    std::mt19937_64 gauss_s_;
    std::mt19937_64 gauss_i_;
    std::mt19937_64 gauss_d_;
    std::mt19937_64 gauss_psi_;
    std::mt19937_64 jump_clock_;
    std::mt19937_64 jump_mark_;
};

} // namespace sirlevy
