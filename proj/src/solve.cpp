#include "ostop/solve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

/// Grid-sampled continuity check: wherever adjacent samples differ
/// noticeably, zoom in on the larger-jump half; a continuous function's
/// jump decays with the width, a discontinuity's does not.
void check_reward_continuity(const RealFn& g, Interval win) {
    const int n = 512;
    for (int i = 0; i < n; ++i) {
        double a = win.lo + win.width() * i / n;
        double b = win.lo + win.width() * (i + 1) / n;
        double ga = g(a), gb = g(b);
        if (!std::isfinite(ga) || !std::isfinite(gb))
            throw InvalidParameterError("reward not finite near x = " + std::to_string(a));
        const double scale = 1.0 + std::max(std::abs(ga), std::abs(gb));
        if (std::abs(gb - ga) < 1e-3 * scale)
            continue;
        for (int k = 0; k < 60 && b - a > 1e-12 * (1.0 + std::abs(a)); ++k) {
            const double mid = 0.5 * (a + b);
            const double gm = g(mid);
            if (std::abs(gm - ga) >= std::abs(gb - gm)) {
                b = mid;
                gb = gm;
            } else {
                a = mid;
                ga = gm;
            }
        }
        if (std::abs(gb - ga) > 1e-6 * scale)
            throw InvalidParameterError("reward looks discontinuous near x = " +
                                        std::to_string(a));
    }
}

std::vector<NegativeComponent> find_components(const DiffusionModel& model,
                                               const RewardSpec& reward,
                                               const SolverOptions& opts) {
    if (reward.is_smooth()) {
        std::vector<NegativeComponent> out;
        for (const Interval& iv : negative_set(model, reward, opts))
            out.push_back({iv, false});
        return out;
    }
    return negative_support(model, std::get<RepresentedReward>(reward.kind).nu, opts);
}

} // namespace

Solution solve(const DiffusionModel& model, const RewardSpec& reward,
               const SolverOptions& opts) {
    const Interval domain = model.domain();
    const Interval win = opts.work_window.intersect(domain);
    if (!(win.lo < win.hi) || !win.bounded())
        throw InvalidParameterError("solve: work window must be bounded and inside the domain");
    if (!(opts.root_tol > 0.0) || !(opts.enlarge_tol > 0.0) || !(opts.gap_tol > 0.0) ||
        opts.max_enlarge_iters < 1)
        throw InvalidParameterError("solve: tolerances must be positive");

    check_reward_continuity(reward.g, win);

    Solution solution;
    solution.model = model;
    solution.reward = reward;

    const std::vector<NegativeComponent> components = find_components(model, reward, opts);
    solution.stats.initial_pairs = static_cast<int>(components.size());
    if (components.empty())
        return solution; // alpha-excessive reward: stop immediately everywhere

    // Cheap spot check of the kernel identity the method rests on.
    if (reward.is_smooth()) {
        std::vector<double> coarse;
        double scale = 1.0;
        for (int i = 0; i < 9; ++i) {
            const double x = win.lo + win.width() * (i + 0.5) / 9;
            coarse.push_back(x);
            scale = std::max(scale, std::abs(reward.g(x)));
        }
        SolverOptions loose = opts;
        loose.quadrature.rel_tol = std::max(opts.quadrature.rel_tol, 1e-7);
        const InversionReport inv = verify_inversion(model, reward, coarse, loose);
        if (inv.max_residual > 1e-2 * scale)
            throw InvalidParameterError(
                "solve: reward fails the kernel inversion identity (residual " +
                std::to_string(inv.max_residual) + "); the method does not apply");
    }

    const MeasureSpec sigma = reward_sigma(model, reward);
    std::vector<Interval> full_negative_set;
    for (const NegativeComponent& comp : components)
        full_negative_set.push_back(comp.interval);

    struct Tracked {
        PairNC pair;
        ConditionReport report;
    };
    std::vector<Tracked> theta;
    for (const NegativeComponent& comp : components) {
        Tracked t;
        t.pair.n = comp.interval;
        t.pair.c = enlarge(model, sigma, comp.interval, full_negative_set, opts, &t.report);
        theta.push_back(std::move(t));
    }

    auto replace_range = [&](std::size_t from, std::size_t to, Interval seed) {
        Tracked merged;
        merged.pair.n = seed;
        merged.pair.c = enlarge(model, sigma, seed, full_negative_set, opts, &merged.report);
        theta.erase(theta.begin() + from, theta.begin() + to + 1);
        theta.insert(theta.begin() + from, std::move(merged));
        ++solution.stats.merges;
    };

    const int max_rounds = solution.stats.initial_pairs + 1;
    for (int round = 0; round < max_rounds; ++round) {
        ++solution.stats.iterations;
        const std::size_t count = theta.size();

        bool whole_space = false;
        for (const Tracked& t : theta)
            whole_space = whole_space || t.pair.c == domain;
        if (whole_space)
            throw DegeneracyError(
                "solve: a widened interval covers the whole state space; the inputs "
                "violate the standing hypotheses (non-negative reward with the kernel "
                "identity)");

        bool disjoint = true;
        for (std::size_t i = 0; i + 1 < count; ++i)
            disjoint = disjoint && theta[i].pair.c.hi + opts.gap_tol < theta[i + 1].pair.c.lo;
        if (disjoint)
            break;

        // A later interval reaching the left boundary absorbs everything
        // before it; symmetrically on the right; otherwise merge the first
        // intersecting neighbours.
        std::size_t j = count;
        for (std::size_t i = count; i-- > 1;)
            if (theta[i].pair.c.lo == domain.lo) {
                j = i;
                break;
            }
        if (j < count) {
            replace_range(0, j, Interval{domain.lo, theta[j].pair.n.hi});
            continue;
        }
        for (std::size_t i = 0; i + 1 < count; ++i)
            if (theta[i].pair.c.hi == domain.hi) {
                j = i;
                break;
            }
        if (j < count) {
            replace_range(j, count - 1, Interval{theta[j].pair.n.lo, domain.hi});
            continue;
        }
        for (std::size_t i = 0; i + 1 < count; ++i)
            if (theta[i].pair.c.intersects(theta[i + 1].pair.c, opts.gap_tol)) {
                j = i;
                break;
            }
        if (j < count) {
            replace_range(j, j + 1, Interval{theta[j].pair.n.lo, theta[j + 1].pair.n.hi});
            continue;
        }
        throw InternalConsistencyError("solve: pairs neither disjoint nor mergeable");
    }

    for (std::size_t i = 0; i + 1 < theta.size(); ++i)
        if (!(theta[i].pair.c.hi + opts.gap_tol < theta[i + 1].pair.c.lo))
            throw InternalConsistencyError("solve: final intervals are not disjoint");

    // Every original negative component must sit inside some final interval.
    for (const Interval& n0 : full_negative_set) {
        const bool covered = std::any_of(theta.begin(), theta.end(), [&](const Tracked& t) {
            return t.pair.c.lo <= n0.lo && n0.hi <= t.pair.c.hi;
        });
        if (!covered)
            throw InternalConsistencyError(
                "solve: a negative component escaped the continuation region");
    }

    for (const Tracked& t : theta) {
        IntervalSolution iv;
        iv.c = t.pair.c;
        auto [k1, k2] = coefficients(model, reward.g, t.pair.c);
        iv.k1 = k1;
        iv.k2 = k2;
        solution.intervals.push_back(iv);
        solution.pairs.push_back(t.pair);
        solution.diagnostics.push_back(t.report);
    }
    return solution;
}

} // namespace ostop
