#include "opstep/biparabolic.hpp"
#include "opstep/csv.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace opstep {

namespace {

std::size_t mesh_cells(double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("mesh: h must be positive");
    }
    const double inv = 1.0 / h;
    const double rounded = std::round(inv);
    if (rounded < 2.0 || std::abs(inv - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument("mesh: 1/h must be an integer >= 2");
    }
    return static_cast<std::size_t>(rounded);
}

/// Sine coefficients of u on the eigenbasis sin(kπx_j):
/// c_k = (2/M)·Σ_j u_j·sin(kπj/M), via the shared table.
std::vector<double> sine_coefficients(const std::vector<double>& u,
                                      const std::vector<double>& sine,
                                      std::size_t M) {
    const std::size_t n = M - 1;
    std::vector<double> c(n);
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            s += u[j - 1] * sine[(k * j) % (2 * M)];
        }
        c[k - 1] = 2.0 * s / static_cast<double>(M);
    }
    return c;
}

} // namespace

SymTridiag build_laplacian(double h) {
    const std::size_t M = mesh_cells(h);
    const double hc = 1.0 / static_cast<double>(M);
    const std::size_t n = M - 1;
    SymTridiag D;
    D.diag.assign(n, 2.0 / (hc * hc));
    D.offdiag.assign(n - 1, -1.0 / (hc * hc));
    return D;
}

std::vector<double> ramp_initial(double h) {
    const std::size_t M = mesh_cells(h);
    std::vector<double> u0(M - 1);
    for (std::size_t j = 1; j < M; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(M);
        u0[j - 1] = (x <= 0.5) ? x : 0.0;
    }
    return u0;
}

BiparabolicProblem assemble(double alpha, double h) {
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("assemble: alpha must be nonnegative");
    }
    BiparabolicProblem p;
    p.M = mesh_cells(h);
    p.h = 1.0 / static_cast<double>(p.M);
    p.alpha = alpha;
    p.D = build_laplacian(h);

    const std::size_t n = p.M - 1;
    p.x.resize(n);
    for (std::size_t j = 1; j <= n; ++j) {
        p.x[j - 1] = static_cast<double>(j) / static_cast<double>(p.M);
    }

    p.C = PolyOperator{p.D, alpha, 0.0, 0.0};
    p.B = PolyOperator{p.D, 1.0, 2.0 * alpha, 0.0};
    p.A = PolyOperator{p.D, 0.0, 1.0, alpha};

    p.sine.resize(2 * p.M);
    for (std::size_t m = 0; m < 2 * p.M; ++m) {
        p.sine[m] = std::sin(std::numbers::pi * static_cast<double>(m) /
                             static_cast<double>(p.M));
    }
    p.lambda.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double s =
            std::sin(0.5 * std::numbers::pi * static_cast<double>(k) * p.h);
        p.lambda[k - 1] = 4.0 / (p.h * p.h) * s * s;
    }

    p.u0 = ramp_initial(h);
    p.modes = sine_coefficients(p.u0, p.sine, p.M);
    return p;
}

void replace_initial(BiparabolicProblem& problem, std::vector<double> u0) {
    if (u0.size() + 1 != problem.M) {
        throw std::invalid_argument(
            "replace_initial: length does not match the mesh");
    }
    problem.u0 = std::move(u0);
    problem.modes = sine_coefficients(problem.u0, problem.sine, problem.M);
}

std::vector<double> exact_solution(const BiparabolicProblem& problem,
                                   double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("exact_solution: t must be nonnegative");
    }
    const std::size_t M = problem.M;
    const std::size_t n = M - 1;
    std::vector<double> scaled(n);
    const double relax =
        problem.alpha > 0.0
            ? problem.alpha * (1.0 - std::exp(-t / problem.alpha))
            : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double factor =
            (1.0 + relax * problem.lambda[k]) * std::exp(-problem.lambda[k] * t);
        scaled[k] = problem.modes[k] * factor;
    }
    std::vector<double> u(n, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        double s = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            s += scaled[k - 1] * problem.sine[(k * j) % (2 * M)];
        }
        u[j - 1] = s;
    }
    return u;
}

std::vector<double> factored_step_solve(const BiparabolicProblem& problem,
                                        double tau,
                                        std::span<const double> rhs) {
    if (!(problem.alpha > 0.0)) {
        throw std::invalid_argument(
            "factored_step_solve: needs alpha > 0 (otherwise C vanishes)");
    }
    if (!(tau >= 0.0)) {
        throw std::invalid_argument("factored_step_solve: tau must be >= 0");
    }
    const double p = 0.5 * tau;
    const double a = problem.alpha;
    // R = (pD + I)(αpD + (p+α)I); each factor is linear in D, so each
    // solve is a single tridiagonal sweep.
    const PolyOperator first{problem.D, 1.0, p, 0.0};
    const PolyOperator second{problem.D, p + a, a * p, 0.0};
    std::vector<double> t = solve(first, rhs);
    return solve(second, t);
}

SecondOrderProblem as_problem(const BiparabolicProblem& problem) {
    if (!(problem.alpha > 0.0)) {
        throw std::invalid_argument(
            "as_problem: schemes need alpha > 0 (C must be SPD)");
    }
    SecondOrderProblem p;
    p.A = problem.A;
    p.B = problem.B;
    p.C = problem.C;
    p.rhs = nullptr; // the benchmark equation is homogeneous
    p.u0 = problem.u0;
    p.du0.assign(problem.u0.size(), 0.0);
    return p;
}

void write_solution_csv(const BiparabolicProblem& problem,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& columns,
                        std::ostream& os) {
    if (times.size() != columns.size()) {
        throw std::invalid_argument(
            "write_solution_csv: times and columns disagree");
    }
    os << "x";
    for (double t : times) {
        os << ",u_t" << csv::format(t);
    }
    os << '\n';
    const std::size_t n = problem.x.size();
    for (std::size_t j = 0; j < n; ++j) {
        os << csv::format(problem.x[j]);
        for (const auto& col : columns) {
            os << ',' << csv::format(col[j]);
        }
        os << '\n';
    }
}

} // namespace opstep
