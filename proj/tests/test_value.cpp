#include <doctest.h>

#include <cmath>
#include <random>

#include "ostop/errors.hpp"
#include "ostop/oracle.hpp"
#include "ostop/solve.hpp"

using namespace ostop;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double quintic(double x) { return -(x - 2.0) * (x - 1.0) * x * (x + 1.0) * (x + 2.0); }

RewardSpec quintic_reward(double alpha) {
    return RewardSpec::smooth(quintic, [alpha](double x) {
        const double g = -std::pow(x, 5) + 5.0 * std::pow(x, 3) - 4.0 * x;
        const double g2 = -20.0 * std::pow(x, 3) + 30.0 * x;
        return alpha * g - 0.5 * g2;
    });
}

double g43(double x) {
    if (x < 1.0)
        return x;
    if (x <= 2.0)
        return 2.0 - x;
    return x - 2.0;
}

RewardSpec reward43() {
    MeasureSpec nu{[](double y) { return 2.0 * g43(y); }, {{1.0, 2.0}, {2.0, -2.0}}, {1.0, 2.0}};
    return RewardSpec::represented(g43, nu, {1.0, 2.0});
}

} // namespace

TEST_SUITE("value") {

TEST_CASE("coefficients of the kinked example") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    // one-sided continuation up to 1/sqrt(2): k1 = 0, k2 = 1/(e sqrt2)
    auto [k1a, k2a] = coefficients(model, g43, {-kInf, 1.0 / kSqrt2});
    CHECK(k1a == 0.0);
    CHECK(k2a == doctest::Approx(1.0 / (std::exp(1.0) * kSqrt2)).epsilon(1e-12));
    CHECK(k2a == doctest::Approx(0.2601).epsilon(1e-3));

    auto [k1b, k2b] = coefficients(model, g43, {1.15, 2.85});
    CHECK(near(k1b, 3.96, 0.05));
    CHECK(near(k2b, 0.013, 0.003));
}

TEST_CASE("coefficients with homogeneous boundary data vanish") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    auto [k1, k2] = coefficients(model, [](double x) { return x * x - 1.0; }, {-1.0, 1.0});
    CHECK(k1 == doctest::Approx(0.0).scale(1.0));
    CHECK(k2 == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("coefficients reject a collapsed interval") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    CHECK_THROWS_AS(coefficients(model, g43, {1.0, 1.0}), InvalidParameterError);
}

TEST_CASE("value matches the reward at finite contact points") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const Solution s = solve(model, quintic_reward(2.0), SolverOptions{});
    for (const IntervalSolution& iv : s.intervals)
        for (double b : {iv.c.lo, iv.c.hi}) {
            if (!std::isfinite(b))
                continue;
            const double inside = iv.k1 * model.phi(b) + iv.k2 * model.psi(b);
            CHECK(near(inside, quintic(b), 1e-8 * (1.0 + std::abs(quintic(b)))));
            CHECK(evaluate(s, b) == quintic(b)); // boundary itself stops
        }
}

TEST_CASE("value equals the reward deep in the stopping region") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const Solution s = solve(model, quintic_reward(2.0), SolverOptions{});
    for (double x : {-6.0, -4.0, 1.6, -0.45})
        CHECK(evaluate(s, x) == quintic(x));
}

TEST_CASE("majorant property on the continuation region") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const Solution s = solve(model, quintic_reward(2.0), SolverOptions{});
    double min_gap = kInf;
    for (const IntervalSolution& iv : s.intervals) {
        const Interval clip = iv.c.intersect({-10.0, 10.0});
        for (int i = 0; i < 400; ++i) {
            const double x = clip.lo + clip.width() * (i + 0.5) / 400;
            min_gap = std::min(min_gap, evaluate(s, x) - quintic(x));
        }
    }
    CHECK(min_gap >= -1e-8);
}

TEST_CASE("closed form agrees with the kernel-integral representation") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const auto reward = quintic_reward(2.0);
    const SolverOptions opts;
    const Solution s = solve(model, reward, opts);
    const MeasureSpec sigma = reward_sigma(model, reward);
    const auto stopping = stopping_region(model.domain(), s.intervals);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        const double direct = evaluate(s, x);
        const double via_kernel = evaluate_integral(model, sigma, stopping, x, opts.quadrature);
        REQUIRE(near(via_kernel, direct, 1e-6 * (1.0 + std::abs(direct))));
    }
}

TEST_CASE("kernel representation returns the reward inside the stopping region") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const auto reward = quintic_reward(2.0);
    const SolverOptions opts;
    const Solution s = solve(model, reward, opts);
    const MeasureSpec sigma = reward_sigma(model, reward);
    const auto stopping = stopping_region(model.domain(), s.intervals);
    for (double x : {-5.0, -0.45, 1.6})
        CHECK(near(evaluate_integral(model, sigma, stopping, x, opts.quadrature), quintic(x),
                   1e-6 * (1.0 + std::abs(quintic(x)))));
}

TEST_CASE("empty stopping region integrates to zero") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const MeasureSpec sigma = reward_sigma(model, quintic_reward(2.0));
    CHECK(evaluate_integral(model, sigma, {}, 0.3, QuadratureOptions{}) == 0.0);
}

TEST_CASE("inversion identity for the quintic at both discounts") {
    const SolverOptions opts;
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i)
        grid.push_back(-4.0 + 8.0 * i / 20.0);
    double max_abs_g = 0.0;
    for (double x : grid)
        max_abs_g = std::max(max_abs_g, std::abs(quintic(x)));

    for (double alpha : {2.0, 1.5}) {
        const auto model = DiffusionModel::standard_brownian(alpha);
        const InversionReport rep = verify_inversion(model, quintic_reward(alpha), grid, opts);
        CHECK(rep.max_residual < 1e-4 * max_abs_g);
        CHECK(std::isfinite(rep.decay_ratio_left));
        CHECK(std::isfinite(rep.decay_ratio_right));
    }
}

TEST_CASE("inversion residual of the zero reward vanishes") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    const auto zero = RewardSpec::smooth([](double) { return 0.0; }, [](double) { return 0.0; });
    const InversionReport rep = verify_inversion(model, zero, {-1.0, 0.0, 2.0}, SolverOptions{});
    CHECK(rep.max_residual == 0.0);
}

TEST_CASE("verification report of the quintic solution") {
    const auto model = DiffusionModel::standard_brownian(2.0);
    const SolverOptions opts;
    const Solution s = solve(model, quintic_reward(2.0), opts);
    const VerificationReport rep = verify_solution(s, opts);

    CHECK(rep.stop_region_max_gap == 0.0);
    CHECK(rep.majorant_min_gap >= -1e-8);
    CHECK(rep.smooth_fit_max < 1e-3);

    double max_alpha_v = 0.0;
    for (const IntervalSolution& iv : s.intervals) {
        const Interval clip = iv.c.intersect({-10.0, 10.0});
        for (int i = 0; i < 100; ++i) {
            const double x = clip.lo + clip.width() * (i + 0.5) / 100;
            max_alpha_v = std::max(max_alpha_v, std::abs(2.0 * evaluate(s, x)));
        }
    }
    CHECK(rep.harmonicity_max < 1e-4 * max_alpha_v);
}

TEST_CASE("verification of a stop-everywhere solution is exact") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    const SolverOptions opts;
    const auto reward =
        RewardSpec::smooth([](double) { return 3.0; }, [](double) { return 3.0; });
    const Solution s = solve(model, reward, opts);
    const VerificationReport rep = verify_solution(s, opts);
    CHECK(rep.stop_region_max_gap == 0.0);
    CHECK(rep.majorant_min_gap == 0.0);
    CHECK(rep.smooth_fit_max == 0.0);
    CHECK(rep.harmonicity_max == 0.0);
}

TEST_CASE("kinked-reward solution verifies cleanly") {
    const auto model = DiffusionModel::standard_brownian(1.0);
    const SolverOptions opts;
    const Solution s = solve(model, reward43(), opts);
    const VerificationReport rep = verify_solution(s, opts);
    CHECK(rep.majorant_min_gap >= -1e-8);
    CHECK(rep.smooth_fit_max < 1e-3);
    CHECK(rep.inversion_residual < 1e-6);
}

TEST_CASE("coefficients at the solution are non-negative") {
    const SolverOptions opts;
    for (double alpha : {2.0, 1.5}) {
        const auto model = DiffusionModel::standard_brownian(alpha);
        const Solution s = solve(model, quintic_reward(alpha), opts);
        for (const IntervalSolution& iv : s.intervals) {
            CHECK(iv.k1 >= -1e-12);
            CHECK(iv.k2 >= -1e-12);
        }
    }
    const auto model1 = DiffusionModel::standard_brownian(1.0);
    const Solution s43 = solve(model1, reward43(), opts);
    for (const IntervalSolution& iv : s43.intervals) {
        CHECK(iv.k1 >= -1e-12);
        CHECK(iv.k2 >= -1e-12);
    }
}

TEST_CASE("evaluate rejects points outside the state space") {
    const double rate = kSqrt2;
    const auto model = DiffusionModel::custom(
        {-5.0, 5.0}, 1.0, [rate](double x) { return std::exp(-rate * x); },
        [rate](double x) { return std::exp(rate * x); }, [](double) { return 1.0; },
        [](double) { return 2.0; }, 0.0, {-4.0, 4.0});
    Solution s;
    s.model = model;
    s.reward = RewardSpec::smooth([](double) { return 1.0; }, [](double) { return 1.0; });
    CHECK_THROWS_AS(evaluate(s, 6.0), DomainError);
}

} // TEST_SUITE
