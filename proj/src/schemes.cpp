#include "opstep/schemes.hpp"
#include "opstep/kernels.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace opstep {

namespace {

const kern::KernelSet& kernels() {
    return kern::active_kernels();
}

bool same_base(const PolyOperator& p, const PolyOperator& q) {
    return p.base.diag == q.base.diag && p.base.offdiag == q.base.offdiag;
}

/// a·P + b·Q + c·R for operators over one shared base.
PolyOperator combine_ops(double a, const PolyOperator& P, double b,
                         const PolyOperator& Q, double c,
                         const PolyOperator& R) {
    PolyOperator out;
    out.base = P.base;
    out.c0 = a * P.c0 + b * Q.c0 + c * R.c0;
    out.c1 = a * P.c1 + b * Q.c1 + c * R.c1;
    out.c2 = a * P.c2 + b * Q.c2 + c * R.c2;
    return out;
}

std::vector<double> zeros(std::size_t n) {
    return std::vector<double>(n, 0.0);
}

[[noreturn]] void check_step_failure(const char* scheme, std::size_t level,
                                     const std::exception& e) {
    throw std::runtime_error(std::string(scheme) + ": step to level " +
                             std::to_string(level) + " failed: " + e.what());
}

} // namespace

void validate_problem(const SecondOrderProblem& problem) {
    const std::size_t n = problem.n();
    if (n == 0) {
        throw std::invalid_argument("problem: empty operators");
    }
    if (problem.B.n() != n || problem.C.n() != n) {
        throw std::invalid_argument("problem: A, B, C dimensions disagree");
    }
    if (!same_base(problem.A, problem.B) || !same_base(problem.A, problem.C)) {
        throw std::invalid_argument(
            "problem: A, B, C must be polynomials in one shared base matrix");
    }
    if (problem.u0.size() != n || problem.du0.size() != n) {
        throw std::invalid_argument(
            "problem: initial data length does not match operator dimension");
    }
    if (!spd_check(problem.A)) {
        throw std::invalid_argument("problem: A is not positive definite");
    }
    if (!spd_check(problem.B)) {
        throw std::invalid_argument("problem: B is not positive definite");
    }
    if (!spd_check(problem.C)) {
        throw std::invalid_argument("problem: C is not positive definite");
    }
}

VectorState init_vector_state(const SecondOrderProblem& problem) {
    const std::size_t n = problem.n();
    VectorState s;
    s.y = problem.u0;
    std::vector<double> Cdu = opstep::apply(problem.C, problem.du0);
    std::vector<double> Bu = opstep::apply(problem.B, problem.u0);
    s.w.resize(n);
    kernels().combine2(1.0, Cdu.data(), 1.0, Bu.data(), s.w.data(), n);
    s.t = 0.0;
    return s;
}

std::vector<double> sample_rhs(const SecondOrderProblem& problem, double t_n,
                               double tau, double sigma,
                               RhsSampling sampling) {
    if (!problem.rhs) {
        return zeros(problem.n());
    }
    if (sampling == RhsSampling::point) {
        return problem.rhs(t_n + sigma * tau);
    }
    std::vector<double> f0 = problem.rhs(t_n);
    std::vector<double> f1 = problem.rhs(t_n + tau);
    std::vector<double> out(f0.size());
    kernels().combine2(sigma, f1.data(), 1.0 - sigma, f0.data(), out.data(),
                       out.size());
    return out;
}

VectorState vector_step(const SecondOrderProblem& problem,
                        const VectorState& state, double tau, double sigma,
                        RhsSampling sampling) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("vector_step: tau must be positive");
    }
    const std::size_t n = problem.n();
    const auto& k = kernels();
    const double om = (1.0 - sigma) * tau;

    std::vector<double> Ay = opstep::apply(problem.A, state.y);
    std::vector<double> chi1(n);
    if (problem.rhs) {
        std::vector<double> f = sample_rhs(problem, state.t, tau, sigma, sampling);
        k.combine3(1.0, state.w.data(), -om, Ay.data(), tau, f.data(),
                   chi1.data(), n);
    } else {
        k.combine2(1.0, state.w.data(), -om, Ay.data(), chi1.data(), n);
    }

    std::vector<double> Cy = opstep::apply(problem.C, state.y);
    std::vector<double> By = opstep::apply(problem.B, state.y);
    std::vector<double> chi2(n);
    k.combine3(1.0, Cy.data(), -om, By.data(), om, state.w.data(),
               chi2.data(), n);

    std::vector<double> chi(n);
    k.combine2(sigma * tau, chi1.data(), 1.0, chi2.data(), chi.data(), n);

    const PolyOperator step_op =
        combine_ops(1.0, problem.C, sigma * tau, problem.B,
                    sigma * sigma * tau * tau, problem.A);

    VectorState next;
    next.y = solve(step_op, chi);
    std::vector<double> Ay1 = opstep::apply(problem.A, next.y);
    next.w.resize(n);
    k.combine2(-sigma * tau, Ay1.data(), 1.0, chi1.data(), next.w.data(), n);
    next.t = state.t + tau;
    return next;
}

Trajectory run_vector_scheme(const SecondOrderProblem& problem,
                             const TimeGrid& grid, double sigma,
                             RhsSampling sampling) {
    validate_problem(problem);
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("run_vector_scheme: sigma must be >= 0");
    }
    Trajectory traj;
    traj.grid = grid;
    traj.scheme = SchemeKind::vector_two_level;
    traj.sigma = sigma;
    traj.sampling = sampling;
    traj.y.reserve(grid.N() + 1);
    traj.w.reserve(grid.N() + 1);

    VectorState state = init_vector_state(problem);
    traj.y.push_back(state.y);
    traj.w.push_back(state.w);
    for (std::size_t i = 0; i < grid.N(); ++i) {
        try {
            state = vector_step(problem, state, grid.steps[i], sigma, sampling);
        } catch (const std::exception& e) {
            check_step_failure("run_vector_scheme", i + 1, e);
        }
        state.t = grid.levels[i + 1];
        traj.y.push_back(state.y);
        traj.w.push_back(state.w);
    }
    return traj;
}

Trajectory run_three_level_uniform(const SecondOrderProblem& problem,
                                   const TimeGrid& grid, double sigma) {
    validate_problem(problem);
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument(
            "run_three_level_uniform: sigma must be >= 0");
    }
    if (grid.N() < 2) {
        throw std::invalid_argument(
            "run_three_level_uniform: needs at least 2 steps");
    }
    if (!is_uniform(grid)) {
        throw std::invalid_argument(
            "run_three_level_uniform: grid is not uniform");
    }
    const std::size_t n = problem.n();
    const auto& k = kernels();
    const double tau = grid.steps[0];

    Trajectory traj;
    traj.grid = grid;
    traj.scheme = SchemeKind::three_level_uniform;
    traj.sigma = sigma;
    traj.sampling = RhsSampling::point; // f is sampled at the level times
    traj.y.reserve(grid.N() + 1);

    traj.y.push_back(problem.u0);
    std::vector<double> y1(n);
    k.combine2(1.0, problem.u0.data(), tau, problem.du0.data(), y1.data(), n);
    traj.y.push_back(std::move(y1));

    const PolyOperator step_op = combine_ops(
        1.0, problem.C, 0.5 * tau, problem.B, sigma * tau * tau, problem.A);

    for (std::size_t level = 1; level < grid.N(); ++level) {
        const auto& yn = traj.y[level];
        const auto& ym = traj.y[level - 1];
        std::vector<double> tmp(n);

        // C·(2yⁿ − y⁻) + (τ/2)·B·y⁻ − τ²·A·((1−2σ)yⁿ + σy⁻) + τ²·f(t_n)
        k.combine2(2.0, yn.data(), -1.0, ym.data(), tmp.data(), n);
        std::vector<double> Cterm = opstep::apply(problem.C, tmp);
        std::vector<double> Bterm = opstep::apply(problem.B, ym);
        k.combine2(1.0 - 2.0 * sigma, yn.data(), sigma, ym.data(), tmp.data(), n);
        std::vector<double> Aterm = opstep::apply(problem.A, tmp);

        std::vector<double> rhs(n);
        k.combine3(1.0, Cterm.data(), 0.5 * tau, Bterm.data(), -tau * tau,
                   Aterm.data(), rhs.data(), n);
        if (problem.rhs) {
            std::vector<double> f = problem.rhs(grid.levels[level]);
            k.combine2(1.0, rhs.data(), tau * tau, f.data(), rhs.data(), n);
        }

        try {
            traj.y.push_back(solve(step_op, rhs));
        } catch (const std::exception& e) {
            check_step_failure("run_three_level_uniform", level + 1, e);
        }
    }
    return traj;
}

double variable_weight(double tau_n, double tau_np1) {
    return tau_np1 / (tau_n + tau_np1);
}

Trajectory run_three_level_nonuniform(const SecondOrderProblem& problem,
                                      const TimeGrid& grid,
                                      RhsSampling sampling) {
    validate_problem(problem);
    if (grid.N() < 2) {
        throw std::invalid_argument(
            "run_three_level_nonuniform: needs at least 2 steps");
    }
    const std::size_t n = problem.n();
    const auto& k = kernels();

    Trajectory traj;
    traj.grid = grid;
    traj.scheme = SchemeKind::three_level_nonuniform;
    traj.sigma = 0.5;
    traj.sampling = sampling;
    traj.y.reserve(grid.N() + 1);
    traj.w.reserve(grid.N() + 1);

    // Bootstrap: one step of the two-level scheme at σ = 0.5.
    VectorState state = init_vector_state(problem);
    traj.y.push_back(state.y);
    traj.w.push_back(state.w);
    VectorState first = vector_step(problem, state, grid.steps[0], 0.5, sampling);
    traj.y.push_back(first.y);
    traj.w.push_back(first.w);

    // f^{n−1/2} sample of the step just taken, reused on the next level.
    std::vector<double> f_prev =
        sample_rhs(problem, grid.levels[0], grid.steps[0], 0.5, sampling);

    for (std::size_t level = 1; level < grid.N(); ++level) {
        const double ta = grid.steps[level - 1]; // τ_n
        const double tb = grid.steps[level];     // τ_{n+1}
        const double rho = tb / ta;
        const auto& yn = traj.y[level];
        const auto& ym = traj.y[level - 1];
        std::vector<double> tmp(n);

        k.combine2(1.0 + rho, yn.data(), -rho, ym.data(), tmp.data(), n);
        std::vector<double> Cterm = opstep::apply(problem.C, tmp);
        std::vector<double> Bterm = opstep::apply(problem.B, ym);
        k.combine2(tb * tb / 4.0 + ta * tb / 4.0, yn.data(), ta * tb / 4.0,
                   ym.data(), tmp.data(), n);
        std::vector<double> Aterm = opstep::apply(problem.A, tmp);

        std::vector<double> rhs(n);
        k.combine3(1.0, Cterm.data(), 0.5 * tb, Bterm.data(), -1.0,
                   Aterm.data(), rhs.data(), n);
        std::vector<double> f_next =
            sample_rhs(problem, grid.levels[level], tb, 0.5, sampling);
        if (problem.rhs) {
            k.combine3(1.0, rhs.data(), tb * tb / 2.0, f_next.data(),
                       ta * tb / 2.0, f_prev.data(), rhs.data(), n);
        }

        const PolyOperator step_op = combine_ops(
            1.0, problem.C, 0.5 * tb, problem.B, tb * tb / 4.0, problem.A);
        std::vector<double> ynext;
        try {
            ynext = solve(step_op, rhs);
        } catch (const std::exception& e) {
            check_step_failure("run_three_level_nonuniform", level + 1, e);
        }

        // Monitoring side channel: w⁺ = −(τ⁺/2)·A·y⁺ + χ1,
        // χ1 = wⁿ − (τ⁺/2)·A·yⁿ + τ⁺·f^{n+1/2}. Never feeds back into y.
        std::vector<double> Ayn = opstep::apply(problem.A, yn);
        std::vector<double> chi1(n);
        if (problem.rhs) {
            k.combine3(1.0, traj.w[level].data(), -0.5 * tb, Ayn.data(), tb,
                       f_next.data(), chi1.data(), n);
        } else {
            k.combine2(1.0, traj.w[level].data(), -0.5 * tb, Ayn.data(),
                       chi1.data(), n);
        }
        std::vector<double> Ay1 = opstep::apply(problem.A, ynext);
        std::vector<double> wnext(n);
        k.combine2(-0.5 * tb, Ay1.data(), 1.0, chi1.data(), wnext.data(), n);

        traj.y.push_back(std::move(ynext));
        traj.w.push_back(std::move(wnext));
        f_prev = std::move(f_next);
    }
    return traj;
}

} // namespace opstep
