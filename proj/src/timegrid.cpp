#include "opstep/timegrid.hpp"
#include "opstep/csv.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <stdexcept>

namespace opstep {

namespace {

void require_positive(double T, std::size_t N) {
    if (!(T > 0.0)) {
        throw std::invalid_argument("time grid: T must be positive");
    }
    if (N == 0) {
        throw std::invalid_argument("time grid: N must be at least 1");
    }
}

/// Levels from steps by extended-precision prefix sums; the end level is
/// pinned to T (the accumulated value differs from T by at most an ulp).
void fill_levels(TimeGrid& g) {
    const std::size_t N = g.steps.size();
    g.levels.resize(N + 1);
    g.levels[0] = 0.0;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < N; ++i) {
        acc += g.steps[i];
        g.levels[i + 1] = static_cast<double>(acc);
    }
    g.levels[N] = g.T;
}

} // namespace

TimeGrid uniform_grid(double T, std::size_t N) {
    require_positive(T, N);
    TimeGrid g;
    g.T = T;
    g.steps.assign(N, T / static_cast<double>(N));
    g.levels.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        g.levels[k] = static_cast<double>(
            static_cast<long double>(T) * static_cast<long double>(k) /
            static_cast<long double>(N));
    }
    g.levels[0] = 0.0;
    g.levels[N] = T;
    return g;
}

TimeGrid random_grid(double T, std::size_t N, double q, std::uint64_t seed) {
    require_positive(T, N);
    if (!(q >= 0.0) || q >= 2.0) {
        throw std::invalid_argument("time grid: q must lie in [0, 2)");
    }
    const double tau = T / static_cast<double>(N);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xi(0.0, 1.0);
    std::vector<double> raw(N);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < N; ++i) {
        raw[i] = tau * (1.0 + q * (xi(rng) - 0.5));
        sum += raw[i];
    }
    const long double factor = static_cast<long double>(T) / sum;
    TimeGrid g;
    g.T = T;
    g.steps.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        g.steps[i] = static_cast<double>(raw[i] * factor);
    }
    fill_levels(g);
    return g;
}

GridStats grid_stats(const TimeGrid& grid) {
    if (grid.steps.empty()) {
        throw std::invalid_argument("grid_stats: empty grid");
    }
    GridStats s{grid.steps[0], grid.steps[0], 1.0};
    for (std::size_t i = 0; i < grid.steps.size(); ++i) {
        s.min_step = std::min(s.min_step, grid.steps[i]);
        s.max_step = std::max(s.max_step, grid.steps[i]);
        if (i > 0) {
            const double r = grid.steps[i] / grid.steps[i - 1];
            s.max_ratio = std::max({s.max_ratio, r, 1.0 / r});
        }
    }
    return s;
}

bool is_uniform(const TimeGrid& grid) {
    return grid_stats(grid).max_ratio <= 1.0 + 1e-12;
}

void write_grid_csv(const TimeGrid& grid, std::ostream& os) {
    os << "n,t_n,tau_n\n";
    os << "0," << csv::format(grid.levels[0]) << ",\n";
    for (std::size_t n = 1; n < grid.levels.size(); ++n) {
        os << n << ',' << csv::format(grid.levels[n]) << ','
           << csv::format(grid.steps[n - 1]) << '\n';
    }
}

} // namespace opstep
