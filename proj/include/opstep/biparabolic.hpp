#pragma once

#include "opstep/linops.hpp"
#include "opstep/schemes.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace opstep {

/// The bi-parabolic benchmark on the unit interval with homogeneous
/// Dirichlet boundaries: (d/dt + D)u + α(d/dt + D)²u = 0, which expands to
/// C·u″ + B·u′ + A·u = 0 with C = αI, B = I + 2αD, A = D + αD² over the
/// grid Laplacian D.
///
/// α = 0 degenerates to the classical heat equation and is allowed for the
/// exact-solution reference only (C vanishes, so the schemes reject it).
struct BiparabolicProblem {
    double alpha = 0.0;
    double h = 0.0;     ///< mesh width 1/M
    std::size_t M = 0;  ///< number of mesh cells; M−1 interior nodes
    std::vector<double> x; ///< interior nodes j·h, j = 1 … M−1
    SymTridiag D;
    PolyOperator C;
    PolyOperator B;
    PolyOperator A;
    std::vector<double> u0; ///< initial state on the interior nodes

    // Spectral data for the exact solution: eigenvalues of D, the sine
    // coefficients of u0, and a shared table sin(π·m/M) for m ∈ [0, 2M).
    std::vector<double> lambda;
    std::vector<double> modes;
    std::vector<double> sine;
};

/// Grid Laplacian on M−1 interior nodes: diagonal 2/h², off-diagonal −1/h²
/// (zero Dirichlet values outside). 1/h must round to an integer M ≥ 2;
/// the canonical width 1/M is used so nodes like 0.5 land exactly.
SymTridiag build_laplacian(double h);

/// Ramp initial state on the interior nodes: u0(x) = x for 0 < x ≤ 0.5 and
/// 0 for 0.5 < x < 1 (the discontinuous reference datum).
std::vector<double> ramp_initial(double h);

/// Assembles the benchmark: operators, ramp initial state, spectral data.
/// Throws std::invalid_argument for α < 0 or an invalid mesh.
BiparabolicProblem assemble(double alpha, double h);

/// Replaces the initial state and refreshes its sine coefficients
/// (used for single-mode studies; dimension must match).
void replace_initial(BiparabolicProblem& problem, std::vector<double> u0);

/// Exact solution u(t) = (I + α(1 − e^{−t/α})·D)·e^{−D·t}·u0, evaluated
/// spectrally: mode k is scaled by (1 + α(1 − e^{−t/α})λ_k)·e^{−λ_k·t}
/// with λ_k = (4/h²)·sin²(kπh/2); for α = 0 the factor is e^{−λ_k·t}.
std::vector<double> exact_solution(const BiparabolicProblem& problem, double t);

/// Solves R·y = rhs for the σ = 1/2 step operator in factored form
/// R = (pD + I)(αpD + (p+α)I), p = τ/2: two shifted tridiagonal solves,
/// never an assembled pentadiagonal system. Requires α > 0; τ = 0 is
/// allowed and collapses to y = rhs/α.
std::vector<double> factored_step_solve(const BiparabolicProblem& problem,
                                        double tau,
                                        std::span<const double> rhs);

/// The benchmark as a scheme-ready homogeneous Cauchy problem
/// (f ≡ 0, u′(0) = 0). Requires α > 0.
SecondOrderProblem as_problem(const BiparabolicProblem& problem);

/// Wide-format snapshot export: header `x,u_t<t1>,u_t<t2>,…`, one row per
/// interior node. columns[i] belongs to times[i].
void write_solution_csv(const BiparabolicProblem& problem,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& columns,
                        std::ostream& os);

} // namespace opstep
