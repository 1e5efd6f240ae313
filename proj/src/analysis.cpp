#include "opstep/analysis.hpp"
#include "opstep/csv.hpp"
#include "opstep/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace opstep {

namespace {

constexpr double estimate_slack = 1e-12;

double quadratic_form(const PolyOperator& op, std::span<const double> u,
                      const char* what) {
    std::vector<double> Pu = opstep::apply(op, u);
    const double form =
        kern::active_kernels().dot(Pu.data(), u.data(), u.size());
    if (form < 0.0) {
        throw std::domain_error(std::string(what) +
                                ": negative quadratic form (operator not SPD)");
    }
    return form;
}

/// ok iff value ≤ limit up to relative slack; returns the relative excess
/// (0 when satisfied) for violation reporting.
std::pair<bool, double> check_bound(double value, double limit) {
    const double scale = std::max({std::abs(value), std::abs(limit), 0.0});
    const double excess = value - limit;
    if (excess <= estimate_slack * scale) {
        return {true, 0.0};
    }
    return {false, scale > 0.0 ? excess / scale : excess};
}

} // namespace

PolyOperator energy_operator(const PolyOperator& C, const PolyOperator& A,
                             double sigma, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("energy_operator: tau must be positive");
    }
    const double factor = (sigma - 0.25) * tau * tau;
    PolyOperator out;
    out.base = C.base;
    out.c0 = C.c0 + factor * A.c0;
    out.c1 = C.c1 + factor * A.c1;
    out.c2 = C.c2 + factor * A.c2;
    return out;
}

double three_level_energy(std::span<const double> y_n,
                          std::span<const double> y_nm1, double tau,
                          const PolyOperator& energy_op,
                          const PolyOperator& A) {
    const std::size_t n = y_n.size();
    if (y_nm1.size() != n) {
        throw std::invalid_argument("three_level_energy: level lengths differ");
    }
    const auto& k = kern::active_kernels();
    std::vector<double> diff(n);
    std::vector<double> mean(n);
    k.combine2(1.0 / tau, y_n.data(), -1.0 / tau, y_nm1.data(), diff.data(), n);
    k.combine2(0.5, y_n.data(), 0.5, y_nm1.data(), mean.data(), n);
    return quadratic_form(energy_op, diff, "three_level_energy") +
           quadratic_form(A, mean, "three_level_energy");
}

StabilityReport check_three_level_estimate(const Trajectory& trajectory,
                                           const SecondOrderProblem& problem,
                                           double sigma) {
    if (trajectory.scheme != SchemeKind::three_level_uniform) {
        throw std::invalid_argument(
            "check_three_level_estimate: trajectory is not from the "
            "three-level uniform scheme");
    }
    const TimeGrid& grid = trajectory.grid;
    const double tau = grid.steps[0];

    StabilityReport report;
    report.scheme = trajectory.scheme;
    report.sigma = sigma;

    const PolyOperator energy_op =
        energy_operator(problem.C, problem.A, sigma, tau);
    report.precondition_ok = spd_check(energy_op);
    report.asserted = (sigma >= 0.25) && report.precondition_ok;
    if (!report.precondition_ok) {
        // The energy is undefined as a norm; nothing to record.
        report.all_ok = false;
        return report;
    }

    const std::size_t N = grid.N();
    report.records.reserve(N);
    report.all_ok = true;

    double prev_energy = 0.0;
    double cumulative = 0.0;
    for (std::size_t level = 1; level <= N; ++level) {
        const double energy = three_level_energy(
            trajectory.y[level], trajectory.y[level - 1], tau, energy_op,
            problem.A);
        bool ok = true;
        double violation = 0.0;
        if (level == 1) {
            cumulative = energy; // E¹: the estimate's initial value
        } else {
            double increment = 0.0;
            if (problem.rhs) {
                std::vector<double> f = problem.rhs(grid.levels[level - 1]);
                const double fn = inv_weighted_norm(problem.B, f);
                increment = 0.5 * tau * fn * fn;
            }
            auto one_step = check_bound(energy, prev_energy + increment);
            cumulative += increment;
            auto cum = check_bound(energy, cumulative);
            ok = one_step.first && cum.first;
            violation = std::max(one_step.second, cum.second);
        }
        report.records.push_back(
            {level, grid.levels[level], energy, cumulative, ok});
        report.all_ok = report.all_ok && ok;
        report.max_violation = std::max(report.max_violation, violation);
        prev_energy = energy;
    }
    return report;
}

double vector_monitor(std::span<const double> y, std::span<const double> w,
                      const PolyOperator& C, const PolyOperator& A) {
    const double yform = quadratic_form(C, y, "vector_monitor");
    std::vector<double> Ainvw = solve(A, w);
    const double wform =
        kern::active_kernels().dot(Ainvw.data(), w.data(), w.size());
    if (wform < 0.0) {
        throw std::domain_error(
            "vector_monitor: negative quadratic form (operator not SPD)");
    }
    return std::sqrt(yform + wform);
}

double vector_monitor(const VectorState& state, const PolyOperator& C,
                      const PolyOperator& A) {
    return vector_monitor(state.y, state.w, C, A);
}

StabilityReport check_vector_estimate(const Trajectory& trajectory,
                                      const SecondOrderProblem& problem,
                                      double sigma) {
    if (trajectory.w.size() != trajectory.y.size()) {
        throw std::invalid_argument(
            "check_vector_estimate: trajectory carries no (y, w) states");
    }
    const TimeGrid& grid = trajectory.grid;

    StabilityReport report;
    report.scheme = trajectory.scheme;
    report.sigma = sigma;
    report.precondition_ok = true;
    report.asserted = sigma >= 0.5;

    const std::size_t N = grid.N();
    report.records.reserve(N + 1);
    report.all_ok = true;

    double prev_monitor = 0.0;
    double cumulative = 0.0;
    for (std::size_t level = 0; level <= N; ++level) {
        const double monitor = vector_monitor(
            trajectory.y[level], trajectory.w[level], problem.C, problem.A);
        bool ok = true;
        double violation = 0.0;
        if (level == 0) {
            cumulative = monitor;
        } else {
            double increment = 0.0;
            if (problem.rhs) {
                std::vector<double> f =
                    sample_rhs(problem, grid.levels[level - 1],
                               grid.steps[level - 1], sigma,
                               trajectory.sampling);
                increment = grid.steps[level - 1] *
                            inv_weighted_norm(problem.A, f);
            }
            auto one_step = check_bound(monitor, prev_monitor + increment);
            cumulative += increment;
            auto cum = check_bound(monitor, cumulative);
            ok = one_step.first && cum.first;
            violation = std::max(one_step.second, cum.second);
        }
        report.records.push_back(
            {level, grid.levels[level], monitor, cumulative, ok});
        report.all_ok = report.all_ok && ok;
        report.max_violation = std::max(report.max_violation, violation);
        prev_monitor = monitor;
    }
    return report;
}

double l2_error(std::span<const double> y, std::span<const double> u_exact,
                double h) {
    if (y.size() != u_exact.size()) {
        throw std::invalid_argument("l2_error: vector lengths differ");
    }
    std::vector<double> diff(y.size());
    kern::active_kernels().combine2(1.0, y.data(), -1.0, u_exact.data(),
                                    diff.data(), y.size());
    const double ss =
        kern::active_kernels().dot(diff.data(), diff.data(), diff.size());
    return std::sqrt(h * ss);
}

std::vector<double>
observed_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 2) {
        throw std::invalid_argument("observed_order: need at least two points");
    }
    std::vector<double> orders;
    orders.reserve(errors.size() - 1);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const auto& [N1, e1] = errors[i];
        const auto& [N2, e2] = errors[i + 1];
        if (!(N2 > N1)) {
            throw std::invalid_argument(
                "observed_order: N values must be strictly increasing");
        }
        if (!(e1 > 0.0) || !(e2 > 0.0)) {
            throw std::invalid_argument(
                "observed_order: errors must be positive");
        }
        orders.push_back(std::log(e1 / e2) / std::log(N2 / N1));
    }
    return orders;
}

void write_report_csv(const StabilityReport& report, std::ostream& os) {
    os << "n,t_n,monitor,bound,ok\n";
    for (const auto& r : report.records) {
        os << r.n << ',' << csv::format(r.t) << ',' << csv::format(r.monitor)
           << ',' << csv::format(r.bound) << ',' << (r.ok ? 1 : 0) << '\n';
    }
}

} // namespace opstep
