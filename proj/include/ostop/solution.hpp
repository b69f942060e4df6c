#pragma once

#include <vector>

#include "ostop/diffusion.hpp"
#include "ostop/reward.hpp"
#include "ostop/solver.hpp"

namespace ostop {

/// One continuation interval with the coefficients of k1*phi + k2*psi on it.
/// A side touching the state-space boundary forces the matching coefficient
/// to zero.
struct IntervalSolution {
    Interval c;
    double k1 = 0.0;
    double k2 = 0.0;
};

struct SolveStats {
    int initial_pairs = 0;
    int merges = 0;
    int iterations = 0;
};

/// Full output of the solver: ordered disjoint continuation intervals with
/// coefficients, the inputs they were computed from, the final (N, C)
/// pairs, and the pair-condition reports recorded for them.
struct Solution {
    DiffusionModel model;
    RewardSpec reward;
    std::vector<IntervalSolution> intervals;
    std::vector<PairNC> pairs;
    std::vector<ConditionReport> diagnostics;
    SolveStats stats;

    bool stop_everywhere() const noexcept { return intervals.empty(); }
};

/// Components of the stopping region: the complement of the continuation
/// intervals within the state space.
std::vector<Interval> stopping_region(const Interval& domain,
                                      const std::vector<IntervalSolution>& intervals);

} // namespace ostop
