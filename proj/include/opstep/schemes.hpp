#pragma once

#include "opstep/linops.hpp"
#include "opstep/timegrid.hpp"

#include <functional>
#include <vector>

namespace opstep {

/// How the forcing sample f^{n+σ} for a step [t_n, t_n + τ] is formed.
enum class RhsSampling {
    point,   ///< f(t_n + σ·τ)
    average, ///< σ·f(t_n + τ) + (1−σ)·f(t_n)
};

enum class SchemeKind {
    vector_two_level,      ///< two-level scheme for the pair (y, w)
    three_level_uniform,   ///< weighted three-level scheme, constant step
    three_level_nonuniform ///< eliminated three-level form, variable weight
};

/// Cauchy problem for C·u″ + B·u′ + A·u = f(t), u(0) = u0, u′(0) = du0.
///
/// A, B, C must be SPD polynomials in one shared base matrix; that shared
/// structure keeps every implicit step operator inside the same polynomial
/// family and therefore solvable by shifted tridiagonal sweeps.
/// rhs may be empty, which means f ≡ 0.
struct SecondOrderProblem {
    PolyOperator A;
    PolyOperator B;
    PolyOperator C;
    std::function<std::vector<double>(double)> rhs;
    std::vector<double> u0;
    std::vector<double> du0;

    std::size_t n() const { return A.n(); }
};

/// Validates dimensions, the shared operator base, and positive
/// definiteness of A, B, C. Throws std::invalid_argument on failure.
/// Called by every scheme runner; available separately for early checking.
void validate_problem(const SecondOrderProblem& problem);

/// One time level of the two-level scheme: y ≈ u(t) and the auxiliary
/// variable w ≈ v(t) = C·u′ + B·u.
struct VectorState {
    std::vector<double> y;
    std::vector<double> w;
    double t = 0.0;
};

/// Computed time history. y holds one vector per grid level for every
/// scheme; w is filled for the vector and eliminated three-level schemes
/// (where it is reconstructed per level) and left empty for the uniform
/// three-level scheme, which never forms it.
struct Trajectory {
    TimeGrid grid;
    SchemeKind scheme = SchemeKind::vector_two_level;
    double sigma = 0.5;
    RhsSampling sampling = RhsSampling::point;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> w;
};

/// Initial state: y = u0, w = C·du0 + B·u0, t = 0.
VectorState init_vector_state(const SecondOrderProblem& problem);

/// Forcing sample for the step from t_n with step τ and weight σ.
/// Returns the zero vector when the problem is homogeneous.
std::vector<double> sample_rhs(const SecondOrderProblem& problem, double t_n,
                               double tau, double sigma,
                               RhsSampling sampling = RhsSampling::point);

/// One step of the two-level scheme:
///   χ1 = wⁿ − (1−σ)τ·A·yⁿ + τ·f^{n+σ}
///   χ2 = (C − (1−σ)τ·B)·yⁿ + (1−σ)τ·wⁿ
///   (C + στ·B + σ²τ²·A)·y⁺ = στ·χ1 + χ2
///   w⁺ = −στ·A·y⁺ + χ1
VectorState vector_step(const SecondOrderProblem& problem,
                        const VectorState& state, double tau, double sigma,
                        RhsSampling sampling = RhsSampling::point);

/// Runs the two-level scheme over the whole grid (uniform or not).
/// Unconditionally stable for σ ≥ 0.5; requires σ ≥ 0.
Trajectory run_vector_scheme(const SecondOrderProblem& problem,
                             const TimeGrid& grid, double sigma,
                             RhsSampling sampling = RhsSampling::point);

/// Weighted three-level scheme on a uniform grid:
///   C·(y⁺ − 2yⁿ + y⁻)/τ² + B·(y⁺ − y⁻)/(2τ)
///     + A·(σ·y⁺ + (1−2σ)·yⁿ + σ·y⁻) = f(t_n),
/// started with y⁰ = u0 and y¹ = u0 + τ·du0 (first-order start, by design).
/// Unconditionally stable for σ ≥ 0.25; requires σ ≥ 0, a uniform grid,
/// and N ≥ 2.
Trajectory run_three_level_uniform(const SecondOrderProblem& problem,
                                   const TimeGrid& grid, double sigma);

/// Variable weight of the eliminated three-level form:
/// τ_{n+1} / (τ_n + τ_{n+1}); equals 1/2 on equal steps.
double variable_weight(double tau_n, double tau_np1);

/// Eliminated three-level scheme on an arbitrary grid (weight fixed at the
/// second-order value σ = 0.5, step weights varying per level):
///   (C + (τ⁺/2)·B + (τ⁺²/4)·A)·y⁺ =
///       C·((1+ρ)·yⁿ − ρ·y⁻) + (τ⁺/2)·B·y⁻
///     − A·((τ⁺²/4 + τ⁻τ⁺/4)·yⁿ + (τ⁻τ⁺/4)·y⁻)
///     + (τ⁺²/2)·f^{n+1/2} + (τ⁻τ⁺/2)·f^{n−1/2},      ρ = τ⁺/τ⁻.
/// The first step is bootstrapped by one vector_step with σ = 0.5; its
/// y-sequence coincides with the vector scheme's up to round-off. w is
/// reconstructed per level for monitoring only and never feeds back.
/// Requires N ≥ 2.
Trajectory run_three_level_nonuniform(const SecondOrderProblem& problem,
                                      const TimeGrid& grid,
                                      RhsSampling sampling = RhsSampling::point);

} // namespace opstep
