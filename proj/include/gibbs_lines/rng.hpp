#ifndef GIBBS_LINES_RNG_HPP
#define GIBBS_LINES_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace gibbs_lines {

// Deterministic random source. All distributions are hand-rolled on top of
// mt19937_64 so that a (seed, call sequence) pair produces identical streams
// on every platform; std:: distribution adapters are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Index in [0, n).
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller (two uniforms per draw, no cached state).
    double normal();

    double exponential() { return -std::log(uniform()); }

    // Gamma(shape, rate 1) by Marsaglia-Tsang, with the usual boost for shape < 1.
    double gamma(double shape);

    double inverse_gamma(double shape) { return 1.0 / gamma(shape); }

private:
    std::mt19937_64 engine_;
};

// Derives independent per-task seeds as a cryptographic hash of
// (root seed, module name, task index); first 8 bytes of SHA-256, little endian.
std::uint64_t derive_seed(std::uint64_t root, std::string_view module_name,
                          std::uint64_t index);

} // namespace gibbs_lines

#endif
