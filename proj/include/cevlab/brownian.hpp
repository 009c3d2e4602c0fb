#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cevlab {

/// Identifies one Brownian path. The (master_seed, path_index) pair is the
/// Philox key/counter prefix, so distinct pairs never share random blocks.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Brownian increments W_{t_{k+1}} - W_{t_k} on a uniform grid of step dt.
class IncrementArray {
public:
    IncrementArray(double dt, std::vector<double> values);

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    /// W_T as the left-to-right sum of the increments.
    [[nodiscard]] double terminal() const noexcept;

    friend bool operator==(const IncrementArray&, const IncrementArray&) = default;

private:
    double dt_;
    std::vector<double> values_;
};

/// Sampled increments are rounded to integer multiples of
/// increment_quantum(dt) = 2^(floor(log2 sqrt(dt)) - 36). Sums of up to ~10^7
/// such values are exact in double precision, so coarsening is associative
/// and every level of a coupled path sees bit-identical Brownian totals.
/// The rounding is ~1e-11 of a standard deviation.
inline constexpr int kQuantumBits = 36;
[[nodiscard]] double increment_quantum(double dt) noexcept;

/// n i.i.d. N(0, dt) draws, bit-reproducible for a given (key, n, dt).
[[nodiscard]] IncrementArray sample_increments(StreamKey key, std::size_t n, double dt);

/// Standard normals for the stream, written into out. Draw i depends only on
/// (key, i), so a prefix of a longer request is identical to a shorter one.
void fill_standard_normals(StreamKey key, std::span<double> out) noexcept;

/// Block sums of `factor` consecutive increments, summed left to right.
/// Throws NonDivisibleFactor unless factor >= 1 divides inc.size().
[[nodiscard]] IncrementArray coarsen(const IncrementArray& inc, std::size_t factor);

}  // namespace cevlab
