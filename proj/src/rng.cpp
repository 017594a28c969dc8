#include "gibbs_lines/rng.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include <openssl/evp.h>

namespace gibbs_lines {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("Rng::gamma: shape must be positive");
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view module_name,
                          std::uint64_t index) {
    unsigned char msg[8 + 256 + 8];
    if (module_name.size() > 256)
        throw std::invalid_argument("derive_seed: module name too long");
    for (int i = 0; i < 8; ++i) msg[i] = static_cast<unsigned char>(root >> (8 * i));
    std::memcpy(msg + 8, module_name.data(), module_name.size());
    const size_t off = 8 + module_name.size();
    for (int i = 0; i < 8; ++i)
        msg[off + i] = static_cast<unsigned char>(index >> (8 * i));

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(msg, off + 8, digest, &digest_len, EVP_sha256(), nullptr) != 1 ||
        digest_len < 8)
        throw std::runtime_error("derive_seed: SHA-256 failed");

    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
    return out;
}

} // namespace gibbs_lines
