#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace graftkit {

// std::mt19937_64 output is fixed by the standard; the std distributions are
// not, so bounded draws are done here to keep seeded runs identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices from [0, n), ascending (selection sampling).
    std::vector<std::size_t> sample_sorted(std::size_t n, std::size_t k) {
        std::vector<std::size_t> out;
        if (k >= n) {
            out.resize(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = i;
            return out;
        }
        out.reserve(k);
        std::size_t needed = k;
        for (std::size_t i = 0; i < n && needed > 0; ++i) {
            if (below(n - i) < needed) {
                out.push_back(i);
                --needed;
            }
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace graftkit
