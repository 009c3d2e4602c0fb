#include "cevlab/brownian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cevlab/errors.hpp"
#include "cevlab/philox.hpp"

namespace cevlab {

namespace {

// 53 random bits mapped to the open interval (0, 1).
double open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

double increment_quantum(double dt) noexcept {
    return std::ldexp(1.0, std::ilogb(std::sqrt(dt)) - kQuantumBits);
}

IncrementArray::IncrementArray(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw GridMismatch("increment dt must be finite and > 0");
    if (values_.empty()) throw GridMismatch("increment array must hold at least one value");
}

double IncrementArray::terminal() const noexcept {
    double w = 0.0;
    for (double v : values_) w += v;
    return w;
}

void fill_standard_normals(StreamKey key, std::span<double> out) noexcept {
    const philox::Key pkey{static_cast<std::uint32_t>(key.master_seed),
                           static_cast<std::uint32_t>(key.master_seed >> 32)};
    const auto path_lo = static_cast<std::uint32_t>(key.path_index);
    const auto path_hi = static_cast<std::uint32_t>(key.path_index >> 32);

    // Each Philox block yields two uniforms and, via Box-Muller, two normals.
    std::uint64_t block = 0;
    for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
        const philox::Counter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                  path_lo, path_hi};
        const auto r = philox::philox4x32_10(ctr, pkey);
        const double u1 = open_unit(r[0], r[1]);
        const double u2 = open_unit(r[2], r[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[i] = radius * std::cos(angle);
        if (i + 1 < out.size()) out[i + 1] = radius * std::sin(angle);
    }
}

IncrementArray sample_increments(StreamKey key, std::size_t n, double dt) {
    if (n < 1) throw GridMismatch("sample_increments needs n >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw GridMismatch("sample_increments needs finite dt > 0");
    std::vector<double> values(n);
    fill_standard_normals(key, values);
    const double scale = std::sqrt(dt);
    const double quantum = increment_quantum(dt);
    for (double& v : values) v = std::nearbyint(v * scale / quantum) * quantum;
    return IncrementArray(dt, std::move(values));
}

IncrementArray coarsen(const IncrementArray& inc, std::size_t factor) {
    if (factor < 1 || inc.size() % factor != 0)
        throw NonDivisibleFactor("coarsening factor " + std::to_string(factor) + " does not divide length " +
                                 std::to_string(inc.size()));
    const std::size_t out_len = inc.size() / factor;
    std::vector<double> out(out_len);
    const auto src = inc.values();
    for (std::size_t j = 0; j < out_len; ++j) {
        double s = 0.0;
        for (std::size_t i = j * factor; i < (j + 1) * factor; ++i) s += src[i];
        out[j] = s;
    }
    return IncrementArray(inc.dt() * static_cast<double>(factor), std::move(out));
}

}  // namespace cevlab
