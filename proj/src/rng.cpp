#include "rng.hpp"

#include "errors.hpp"

namespace cspec {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    std::uint64_t out = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    out ^= splitmix64(s);
    s ^= b + 0xd1b54a32d192ed03ULL;
    out ^= splitmix64(s);
    return out;
}

int RngStream::uniform_int(int bound) {
    require(bound > 0, "uniform_int: bound must be positive");
    std::uniform_int_distribution<int> dist(0, bound - 1);
    return dist(engine_);
}

double RngStream::uniform_real() {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
}

std::vector<int> RngStream::permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
        int j = uniform_int(i + 1);
        std::swap(p[i], p[j]);
    }
    return p;
}

std::vector<int> RngStream::full_cycle(int n) {
    require(n >= 1, "full_cycle: n must be positive");
    std::vector<int> pi = permutation(n);
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[pi[i]] = pi[(i + 1) % n];
    return sigma;
}

std::vector<int> RngStream::perfect_matching(int n) {
    require(n >= 0 && n % 2 == 0, "perfect_matching: n must be even");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> sigma(n, -1);
    int remaining = n;
    while (remaining > 0) {
        int a = pool[0];
        int j = 1 + uniform_int(remaining - 1);
        int b = pool[j];
        sigma[a] = b;
        sigma[b] = a;
        pool[j] = pool[remaining - 1];
        pool[0] = pool[remaining - 2];
        remaining -= 2;
    }
    return sigma;
}

std::vector<int> RngStream::near_perfect_matching(int n) {
    require(n >= 1 && n % 2 == 1, "near_perfect_matching: n must be odd");
    int fixed = uniform_int(n);
    std::vector<int> pool;
    pool.reserve(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != fixed) pool.push_back(i);
    std::vector<int> sigma(n, -1);
    sigma[fixed] = fixed;
    int remaining = n - 1;
    while (remaining > 0) {
        int a = pool[0];
        int j = 1 + uniform_int(remaining - 1);
        int b = pool[j];
        sigma[a] = b;
        sigma[b] = a;
        pool[j] = pool[remaining - 1];
        pool[0] = pool[remaining - 2];
        remaining -= 2;
    }
    return sigma;
}

}  // namespace cspec
