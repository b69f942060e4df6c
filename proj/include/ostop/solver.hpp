#pragma once

#include <vector>

#include "ostop/diffusion.hpp"
#include "ostop/interval.hpp"
#include "ostop/measure.hpp"
#include "ostop/reward.hpp"

namespace ostop {

struct SolverOptions {
    /// Bounded window for grid scans when the state space is unbounded. All
    /// sign changes of the driving density must fall inside it.
    Interval work_window{-10.0, 10.0};
    int scan_points = 2001;
    /// Width tolerance of the bisections locating integral zero crossings.
    double root_tol = 1e-9;
    /// Stop widening when neither endpoint moves more than this (relative).
    double enlarge_tol = 1e-8;
    int max_enlarge_iters = 100;
    /// Intervals whose endpoints are closer than this count as intersecting.
    double gap_tol = 1e-7;
    /// Points per interval when testing the kernel-integral sign condition.
    int condition_grid = 101;
    QuadratureOptions quadrature;
};

/// A negative interval N tracked together with its widened interval C,
/// N inside C.
struct PairNC {
    Interval n;
    Interval c;
};

/// One connected component of the set where the driving measure is
/// negative: an open interval of negative density, or a degenerate
/// interval marking a single atom of negative mass.
struct NegativeComponent {
    Interval interval;
    bool atom_seed = false;
};

/// Numerical record of the pair conditions for (N, C): the two integrals
/// over N (both must be <= 0), the phi/psi integrals over C against the
/// restricted measure (zero when the respective side of C is interior),
/// and the largest kernel integral over a grid in C (must be <= 0).
/// Residual tolerances scale as abs_tol + 1e-6 * (total-variation integral).
struct ConditionReport {
    double i_phi = 0.0;
    double i_psi = 0.0;
    double ii_residual = 0.0;
    double iii_residual = 0.0;
    double iv_max = 0.0;
    bool ii_applicable = false;
    bool iii_applicable = false;
    double ii_scale = 0.0;
    double iii_scale = 0.0;
    bool satisfied = false;
};

/// Maximal open intervals where (alpha - L)g < 0, located by a sign scan
/// over the work window refined by bisection; a component whose sign
/// persists at a window edge of an unbounded state space is extended to the
/// boundary. Empty result means the reward is alpha-excessive (stop
/// everywhere). Throws ResolutionError when the sign structure is finer
/// than the scan can support.
std::vector<Interval> negative_set(const DiffusionModel& model, const RewardSpec& reward,
                                   const SolverOptions& opts);

/// Negative components of a representing measure: intervals of negative
/// density plus degenerate entries for negative atoms outside them.
std::vector<NegativeComponent> negative_support(const DiffusionModel& model,
                                                const MeasureSpec& nu,
                                                const SolverOptions& opts);

/// Integral of the Green kernel G(x, .) against sigma over `over`,
/// splitting at x where the kernel has its kink.
double green_integral(const DiffusionModel& model, const MeasureSpec& sigma, Interval over,
                      double x, const QuadratureOptions& opts);

ConditionReport check_condition(const DiffusionModel& model, const MeasureSpec& sigma_n,
                                Interval n, Interval c, const SolverOptions& opts);

/// Widen N = (a, b) to the interval C that zeroes the phi- and psi-integrals
/// of the restricted measure: alternately move the left endpoint to the
/// zero of z -> integral over (z, y) of phi, and the right endpoint to the
/// zero of z -> integral over (x, z) of psi, both by bisection (the
/// integrals are monotone in z because the restricted measure is
/// non-negative outside N). An endpoint whose integral stays negative out
/// to the window edge is sent to the state-space boundary. The result must
/// pass check_condition; the report is written to `report` when given.
Interval enlarge(const DiffusionModel& model, const MeasureSpec& sigma, Interval n,
                 const std::vector<Interval>& negative_set, const SolverOptions& opts,
                 ConditionReport* report = nullptr);

} // namespace ostop
