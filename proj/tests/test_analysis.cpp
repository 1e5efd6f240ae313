#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opstep/analysis.hpp"
#include "opstep/biparabolic.hpp"
#include "opstep/schemes.hpp"
#include "opstep/timegrid.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using opstep::PolyOperator;
using opstep::SecondOrderProblem;
using opstep::StabilityReport;
using opstep::SymTridiag;
using opstep::TimeGrid;

namespace {

SymTridiag scalar_base(double d) {
    return SymTridiag{{d}, {}};
}

} // namespace

TEST_CASE("energy_operator: collapse at the quarter weight, scalar value, "
          "indefinite flag") {
    SymTridiag base{{2.0, 2.0}, {-1.0}};
    const PolyOperator C{base, 0.3, 0.1, 0.0};
    const PolyOperator A{base, 0.0, 1.0, 0.2};

    const PolyOperator at_quarter = opstep::energy_operator(C, A, 0.25, 0.7);
    CHECK(at_quarter.c0 == C.c0);
    CHECK(at_quarter.c1 == C.c1);
    CHECK(at_quarter.c2 == C.c2);

    // Scalar C = A = [1], σ = 0.5, τ = 1: C + 0.25·A = [1.25].
    const PolyOperator Cs{scalar_base(1.0), 0.0, 1.0, 0.0};
    const PolyOperator As{scalar_base(1.0), 0.0, 1.0, 0.0};
    const PolyOperator E = opstep::energy_operator(Cs, As, 0.5, 1.0);
    CHECK(opstep::apply(E, std::vector<double>{1.0})[0] ==
          doctest::Approx(1.25).epsilon(1e-15));

    // σ = 0 with large τ drives C − (τ²/4)·A indefinite.
    const PolyOperator Cbig{scalar_base(100.0), 0.01, 0.0, 0.0};
    const PolyOperator Abig{scalar_base(100.0), 0.0, 1.0, 0.0};
    const PolyOperator indef = opstep::energy_operator(Cbig, Abig, 0.0, 1.0);
    CHECK_FALSE(opstep::spd_check(indef));
    CHECK(opstep::spd_check(opstep::energy_operator(Cbig, Abig, 0.5, 1.0)));

    CHECK_THROWS_AS(opstep::energy_operator(Cs, As, 0.5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("three_level_energy: constant, antisymmetric, and pinned values") {
    // Constant pair: difference term vanishes.
    const PolyOperator E{scalar_base(1.25), 0.0, 1.0, 0.0};
    const PolyOperator A{scalar_base(1.0), 0.0, 1.0, 0.0};
    const std::vector<double> c = {2.0};
    CHECK(opstep::three_level_energy(c, c, 0.1, E, A) ==
          doctest::Approx(4.0).epsilon(1e-15));

    // Antisymmetric pair: mean term vanishes.
    const std::vector<double> plus = {1.5};
    const std::vector<double> minus = {-1.5};
    CHECK(opstep::three_level_energy(plus, minus, 0.1, E, A) ==
          doctest::Approx(1.25 * 30.0 * 30.0).epsilon(1e-14));

    // Hand-pinned mixed value.
    const std::vector<double> y1 = {0.99};
    const std::vector<double> y0 = {1.0};
    CHECK(opstep::three_level_energy(y1, y0, 0.1, E, A) ==
          doctest::Approx(1.002525).epsilon(1e-14));

    CHECK_THROWS_AS(
        opstep::three_level_energy(plus, std::vector<double>{1.0, 2.0}, 0.1,
                                   E, A),
        std::invalid_argument);
}

TEST_CASE("three-level estimate: homogeneous decay is certified") {
    const opstep::BiparabolicProblem bp = opstep::assemble(0.01, 0.1);
    const SecondOrderProblem p = opstep::as_problem(bp);
    // τ = 0.025 ≥ 2.5·alpha keeps the σ = 1/2 step operator real-factorizable.
    const TimeGrid grid = opstep::uniform_grid(1.0, 40);
    for (double sigma : {0.25, 0.5}) {
        const opstep::Trajectory traj =
            opstep::run_three_level_uniform(p, grid, sigma);
        const StabilityReport report =
            opstep::check_three_level_estimate(traj, p, sigma);
        CHECK(report.asserted);
        CHECK(report.precondition_ok);
        CHECK(report.all_ok);
        CHECK(report.max_violation == 0.0);
        CHECK(report.records.size() == 40);
        // Homogeneous: the bound column is the constant initial energy.
        for (const auto& rec : report.records) {
            CHECK(rec.bound == report.records.front().bound);
        }
        for (std::size_t i = 1; i < report.records.size(); ++i) {
            CHECK(report.records[i].monitor <=
                  report.records[i - 1].monitor *
                      (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("three-level estimate: non-SPD energy operator is flagged, "
          "not asserted") {
    // σ = 0.2 below the quarter threshold with a coarse step: the energy
    // operator loses definiteness, so the report downgrades to observe mode
    // with no records.
    const opstep::BiparabolicProblem bp = opstep::assemble(0.01, 0.1);
    const SecondOrderProblem p = opstep::as_problem(bp);
    const TimeGrid grid = opstep::uniform_grid(1.0, 10);
    const opstep::Trajectory traj =
        opstep::run_three_level_uniform(p, grid, 0.2);
    const StabilityReport report =
        opstep::check_three_level_estimate(traj, p, 0.2);
    CHECK_FALSE(report.precondition_ok);
    CHECK_FALSE(report.asserted);
    CHECK_FALSE(report.all_ok);
    CHECK(report.records.empty());
}

TEST_CASE("three-level estimate rejects foreign trajectories") {
    std::mt19937_64 gen(3);
    const SecondOrderProblem p = testsup::random_family_problem(4, gen);
    const TimeGrid grid = opstep::uniform_grid(1.0, 4);
    const opstep::Trajectory traj = opstep::run_vector_scheme(p, grid, 0.5);
    CHECK_THROWS_AS(opstep::check_three_level_estimate(traj, p, 0.5),
                    std::invalid_argument);
}

TEST_CASE("zero trajectory satisfies the estimate with equality") {
    opstep::BiparabolicProblem bp = opstep::assemble(0.01, 0.1);
    SecondOrderProblem p = opstep::as_problem(bp);
    p.u0.assign(p.u0.size(), 0.0);
    const TimeGrid grid = opstep::uniform_grid(1.0, 10);
    const opstep::Trajectory traj =
        opstep::run_three_level_uniform(p, grid, 0.5);
    const StabilityReport report =
        opstep::check_three_level_estimate(traj, p, 0.5);
    CHECK(report.all_ok);
    for (const auto& rec : report.records) {
        CHECK(rec.monitor == 0.0);
        CHECK(rec.bound == 0.0);
        CHECK(rec.ok);
    }
}

TEST_CASE("vector_monitor: zero, pinned scalar, and y = 0 branch") {
    const PolyOperator C{scalar_base(1.0), 0.0, 1.0, 0.0};
    const PolyOperator A{scalar_base(4.0), 0.0, 1.0, 0.0};
    CHECK(opstep::vector_monitor(std::vector<double>{0.0},
                                 std::vector<double>{0.0}, C, A) == 0.0);
    // ‖y‖²_C = 1, ‖w‖²_{A⁻¹} = (1/4)·2·2 = 1 → √2.
    CHECK(opstep::vector_monitor(std::vector<double>{1.0},
                                 std::vector<double>{2.0}, C, A) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // From initial data with u0 = 0: the monitor is ‖C·u0'‖_{A⁻¹}.
    SecondOrderProblem p;
    p.A = A;
    p.B = PolyOperator{scalar_base(4.0), 1.0, 0.0, 0.0};
    p.C = PolyOperator{scalar_base(4.0), 0.25, 0.0, 0.0};
    p.u0 = {0.0};
    p.du0 = {3.0};
    const opstep::VectorState s = opstep::init_vector_state(p);
    const double expected =
        opstep::inv_weighted_norm(p.A, opstep::apply(p.C, p.du0));
    CHECK(opstep::vector_monitor(s, p.C, p.A) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("vector estimate: homogeneous decay on uniform and random grids") {
    const opstep::BiparabolicProblem bp = opstep::assemble(0.01, 0.1);
    const SecondOrderProblem p = opstep::as_problem(bp);
    for (bool random : {false, true}) {
        const TimeGrid grid = random ? opstep::random_grid(0.1, 40, 0.5, 9)
                                     : opstep::uniform_grid(0.1, 40);
        for (double sigma : {0.5, 1.0}) {
            const opstep::Trajectory traj =
                opstep::run_vector_scheme(p, grid, sigma);
            const StabilityReport report =
                opstep::check_vector_estimate(traj, p, sigma);
            CHECK(report.asserted);
            CHECK(report.all_ok);
            CHECK(report.records.size() == 41);
            for (std::size_t i = 1; i < report.records.size(); ++i) {
                CHECK(report.records[i].monitor <=
                      report.records[i - 1].monitor * (1.0 + 1e-12));
            }
            // Homogeneous: constant bound column.
            for (const auto& rec : report.records) {
                CHECK(rec.bound == report.records.front().bound);
            }
        }
    }
}

TEST_CASE("vector estimate: forcing obeys the cumulative bound; low sigma "
          "observes only") {
    std::mt19937_64 gen(23);
    const SecondOrderProblem p = testsup::random_family_problem(6, gen);
    const TimeGrid grid = opstep::random_grid(1.0, 30, 0.5, 4);
    for (double sigma : {0.5, 0.75, 1.0}) {
        const opstep::Trajectory traj =
            opstep::run_vector_scheme(p, grid, sigma);
        const StabilityReport report =
            opstep::check_vector_estimate(traj, p, sigma);
        CHECK(report.asserted);
        CHECK(report.all_ok);
    }
    const opstep::Trajectory explicit_traj =
        opstep::run_vector_scheme(p, grid, 0.0);
    const StabilityReport observe =
        opstep::check_vector_estimate(explicit_traj, p, 0.0);
    CHECK_FALSE(observe.asserted);
    CHECK(observe.records.size() == 31);

    // Quarter weight: its step operator always factors on this family, and
    // the trajectory (no w component) must still be rejected by the
    // two-level audit regardless of the weight passed in.
    const opstep::Trajectory three = opstep::run_three_level_uniform(
        p, opstep::uniform_grid(1.0, 10), 0.25);
    CHECK_THROWS_AS(opstep::check_vector_estimate(three, p, 0.5),
                    std::invalid_argument);
}

TEST_CASE("l2_error: exact, offset, and single-node cases") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    CHECK(opstep::l2_error(a, a, 0.25) == 0.0);

    // Constant offset δ on M−1 interior nodes, h = 1/M: δ·√(1 − h).
    const std::size_t M = 10;
    const double h = 1.0 / static_cast<double>(M);
    const double delta = 0.3;
    std::vector<double> y(M - 1, delta);
    std::vector<double> u(M - 1, 0.0);
    CHECK(opstep::l2_error(y, u, h) ==
          doctest::Approx(delta * std::sqrt(1.0 - h)).epsilon(1e-14));

    CHECK(opstep::l2_error(std::vector<double>{3.0},
                           std::vector<double>{0.0}, 0.5) ==
          doctest::Approx(3.0 * std::sqrt(0.5)).epsilon(1e-15));

    CHECK_THROWS_AS(opstep::l2_error(std::vector<double>{1.0}, a, 0.1),
                    std::invalid_argument);
}

TEST_CASE("observed_order: doubling, flat, non-doubling, and rejection") {
    using pairs = std::vector<std::pair<double, double>>;
    CHECK(opstep::observed_order(pairs{{100.0, 4e-4}, {200.0, 1e-4}})[0] ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(opstep::observed_order(pairs{{100.0, 2e-3}, {200.0, 1e-3}})[0] ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(opstep::observed_order(pairs{{100.0, 5e-3}, {200.0, 5e-3}})[0] ==
          doctest::Approx(0.0));
    CHECK(opstep::observed_order(pairs{{100.0, 9e-3}, {300.0, 1e-3}})[0] ==
          doctest::Approx(std::log(9.0) / std::log(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(opstep::observed_order(pairs{{100.0, 1e-3}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        opstep::observed_order(pairs{{200.0, 1e-3}, {100.0, 1e-3}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        opstep::observed_order(pairs{{100.0, 0.0}, {200.0, 1e-3}}),
        std::invalid_argument);
}

TEST_CASE("stability CSV: header and 1/0 flags") {
    std::mt19937_64 gen(6);
    const SecondOrderProblem p = testsup::random_family_problem(3, gen);
    const TimeGrid grid = opstep::uniform_grid(0.5, 5);
    const opstep::Trajectory traj = opstep::run_vector_scheme(p, grid, 0.5);
    const StabilityReport report = opstep::check_vector_estimate(traj, p, 0.5);
    std::ostringstream os;
    opstep::write_report_csv(report, os);
    const std::string text = os.str();
    CHECK(text.rfind("n,t_n,monitor,bound,ok\n", 0) == 0);
    CHECK(text.find(",1\n") != std::string::npos);
    CHECK(text.find("ok\n0,") != std::string::npos);
}
