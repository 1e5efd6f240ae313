#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace opstep {

/// Strictly increasing time levels 0 = t_0 < t_1 < … < t_N = T with steps
/// τ_n = t_n − t_{n−1}. Construction guarantees every τ_n > 0, levels[0] = 0,
/// levels[N] = T, and Σ τ_n = T to 1e−14·T.
struct TimeGrid {
    double T = 0.0;
    std::vector<double> steps;  ///< τ_1 … τ_N
    std::vector<double> levels; ///< t_0 … t_N

    std::size_t N() const { return steps.size(); }
};

/// Grid with all steps equal to T/N.
/// Throws std::invalid_argument for T ≤ 0 or N = 0.
TimeGrid uniform_grid(double T, std::size_t N);

/// Randomly perturbed grid: raw steps τ·(1 + q·(ξ − 0.5)) with ξ uniform on
/// [0,1) and τ = T/N, then all steps rescaled by one common factor so the
/// grid ends exactly at T. Rescaling preserves adjacent step ratios, so the
/// pairwise ratio stays ≤ (1 + q/2)/(1 − q/2) (5/3 at the default q = 0.5).
/// Deterministic for a fixed (T, N, q, seed).
/// Throws std::invalid_argument for T ≤ 0, N = 0, or q outside [0, 2).
TimeGrid random_grid(double T, std::size_t N, double q, std::uint64_t seed);

struct GridStats {
    double min_step;
    double max_step;
    double max_ratio; ///< max over adjacent pairs of max(τ_{n+1}/τ_n, τ_n/τ_{n+1})
};

GridStats grid_stats(const TimeGrid& grid);

/// True when all steps are equal up to 1e−12 relative (adjacent ratios).
bool is_uniform(const TimeGrid& grid);

/// CSV export with header `n,t_n,tau_n`; the row for n = 0 leaves tau_n empty.
void write_grid_csv(const TimeGrid& grid, std::ostream& os);

} // namespace opstep
