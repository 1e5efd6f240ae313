#pragma once

#include "opstep/linops.hpp"
#include "opstep/schemes.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace opstep {

/// One monitored time level: the monitor value, the cumulative a priori
/// bound it must stay under, and whether it does (with slack).
struct StabilityRecord {
    std::size_t n;
    double t;
    double monitor;
    double bound;
    bool ok;
};

/// Outcome of auditing one trajectory against its a priori estimate.
///
/// `asserted` is true when the weight reached the guarantee threshold and
/// the preconditions held; below the threshold the estimate is monitored in
/// observe mode and `all_ok` is informational only. Each record's `ok`
/// verifies both the one-step inequality and the cumulative bound, with
/// 1e−12 relative slack absorbing round-off.
struct StabilityReport {
    SchemeKind scheme = SchemeKind::vector_two_level;
    double sigma = 0.5;
    bool asserted = false;
    bool precondition_ok = true;
    std::vector<StabilityRecord> records;
    bool all_ok = false;
    double max_violation = 0.0; ///< worst relative excess over a bound, 0 if none
};

/// Energy operator of the three-level estimate: C + (σ − 1/4)·τ²·A.
/// SPD iff σ ≥ 1/4 (given SPD C, A); SPD status is reported by spd_check,
/// not enforced here.
PolyOperator energy_operator(const PolyOperator& C, const PolyOperator& A,
                             double sigma, double tau);

/// Level energy of the three-level scheme over the pair (yⁿ, y⁻):
/// ‖(yⁿ − y⁻)/τ‖²_E + ‖(yⁿ + y⁻)/2‖²_A for the energy operator E.
/// Throws std::domain_error if either quadratic form is negative.
double three_level_energy(std::span<const double> y_n,
                          std::span<const double> y_nm1, double tau,
                          const PolyOperator& energy_op,
                          const PolyOperator& A);

/// Audits a three-level uniform trajectory against its a priori estimate:
/// per level, E⁺ ≤ Eⁿ + (τ/2)·‖f(t_n)‖²_{B⁻¹} and the cumulative form
/// E ≤ E¹ + (1/2)·Σ τ·‖f(t_k)‖²_{B⁻¹}. Asserted for σ ≥ 1/4; below that
/// (or when the energy operator is not SPD) the report is observe-only,
/// and a non-SPD energy operator empties the records since the energy is
/// undefined as a norm.
StabilityReport check_three_level_estimate(const Trajectory& trajectory,
                                           const SecondOrderProblem& problem,
                                           double sigma);

/// Monitor of the two-level scheme: (‖y‖²_C + ‖w‖²_{A⁻¹})^{1/2}.
double vector_monitor(std::span<const double> y, std::span<const double> w,
                      const PolyOperator& C, const PolyOperator& A);
double vector_monitor(const VectorState& state, const PolyOperator& C,
                      const PolyOperator& A);

/// Audits a (y, w) trajectory against the two-level a priori estimate:
/// per level, M⁺ ≤ Mⁿ + τ·‖f^{n+σ}‖_{A⁻¹} and the cumulative form
/// M ≤ M⁰ + Σ τ_{k+1}·‖f^{k+σ}‖_{A⁻¹}, using the same f-sampling the
/// stepper used. Asserted for σ ≥ 0.5; observe mode below.
StabilityReport check_vector_estimate(const Trajectory& trajectory,
                                      const SecondOrderProblem& problem,
                                      double sigma);

/// Mesh norm of a nodal error: (Σ (y_i − u_i)²·h)^{1/2} over interior nodes.
double l2_error(std::span<const double> y, std::span<const double> u_exact,
                double h);

/// Observed convergence orders between consecutive (N, ε) pairs:
/// log(ε_i/ε_{i+1}) / log(N_{i+1}/N_i). Requires strictly increasing N and
/// positive errors.
std::vector<double>
observed_order(const std::vector<std::pair<double, double>>& errors);

/// CSV export with header `n,t_n,monitor,bound,ok` (ok as 1/0).
void write_report_csv(const StabilityReport& report, std::ostream& os);

} // namespace opstep
