#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ostop/solution.hpp"
#include "ostop/value.hpp"

namespace ostop {

/// Stop at the first entry into any of these closed intervals.
struct StoppingPolicy {
    std::vector<Interval> stop_set; // disjoint, sorted

    static StoppingPolicy from_solution(const Solution& s) {
        return {stopping_region(s.model.domain(), s.intervals)};
    }

    bool stops_at(double x) const noexcept {
        for (const Interval& iv : stop_set)
            if (iv.closure_contains(x))
                return true;
        return false;
    }
};

struct OracleEstimate {
    double value = 0.0;
    double std_error = 0.0; // zero for deterministic evaluations
};

/// Expected discounted reward of an interval-hitting policy, in closed
/// form: g(x) inside the stop set, otherwise the two-sided (or one-sided)
/// exit value of the gap containing x with boundary data g. Never stopping
/// pays zero.
OracleEstimate policy_value(const DiffusionModel& model, const RealFn& g,
                            const StoppingPolicy& policy, double x);

struct BruteForcePoint {
    double x = 0.0;
    double best_value = 0.0;
    /// The gap realizing the maximum; absent when stopping immediately wins.
    std::optional<Interval> best_gap;
};

struct BruteForceResult {
    std::vector<BruteForcePoint> points;
};

/// Exhaustive search over policies whose gaps have endpoints on a uniform
/// grid. The value of a multi-gap policy at x depends only on the gap
/// covering x, so the per-point maximum over all k-gap placements (k in
/// gap_counts) reduces to a scan over single grid gaps containing x.
BruteForceResult brute_force(const DiffusionModel& model, const RealFn& g,
                             const std::vector<int>& gap_counts, Interval window,
                             double grid_step, const std::vector<double>& eval_points);

/// Discounted-reward simulation for the Brownian family: exact Gaussian
/// increments, first entry into the stop set detected by segment crossing
/// with linear time interpolation plus a bridge correction for excursions
/// between grid times. Deterministic for a fixed seed.
OracleEstimate monte_carlo_value(const DiffusionModel& model, const RealFn& g,
                                 const StoppingPolicy& policy, double x, int n_paths,
                                 double dt, std::uint64_t seed);

} // namespace ostop
