#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cspec {

// SplitMix64 step; used only to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic substream derivation.  Every random draw in the library
// comes from a stream keyed by (master seed, trial index, edge index):
// the master seed is advanced through SplitMix64 once per key component,
// and the result seeds a Mersenne twister.  Identical keys give identical
// streams on any thread, which is what makes seeded experiments
// reproducible under --threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on {0, ..., bound-1}.
    int uniform_int(int bound);

    double uniform_real();  // [0, 1)

    // Uniform permutation of [n] via Fisher-Yates.
    std::vector<int> permutation(int n);

    // Uniform permutation with a single n-cycle: conjugate the canonical
    // cycle i -> i+1 (mod n) by a uniform permutation.
    std::vector<int> full_cycle(int n);

    // Uniform fixed-point-free involution; n must be even.
    std::vector<int> perfect_matching(int n);

    // Uniform involution with exactly one fixed point; n must be odd.
    std::vector<int> near_perfect_matching(int n);

private:
    std::mt19937_64 engine_;
};

}  // namespace cspec
