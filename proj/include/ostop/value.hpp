#pragma once

#include <utility>
#include <vector>

#include "ostop/solution.hpp"

namespace ostop {

/// Numerical checks of the identities the solution must satisfy.
struct VerificationReport {
    /// Max grid residual of g(x) minus the kernel integral of its
    /// representing measure.
    double inversion_residual = 0.0;
    /// Min over the grid of V - g (majorant property; ~0 at contact points).
    double majorant_min_gap = 0.0;
    /// Max over the stopping-region grid of |V - g|.
    double stop_region_max_gap = 0.0;
    /// Max one-sided derivative mismatch of V at finite contact points.
    double smooth_fit_max = 0.0;
    /// Max |alpha*V - LV| over continuation interiors (Feller second
    /// difference).
    double harmonicity_max = 0.0;
};

struct InversionReport {
    double max_residual = 0.0;
    /// |g|/phi at the left window edge and |g|/psi at the right one.
    double decay_ratio_left = 0.0;
    double decay_ratio_right = 0.0;
};

/// Coefficients (k1, k2) making k1*phi + k2*psi match g at the finite
/// endpoints of a continuation interval; one-sided intervals use
/// (0, g(hi)/psi(hi)) or (g(lo)/phi(lo), 0).
std::pair<double, double> coefficients(const DiffusionModel& model, const RealFn& g,
                                       Interval c);

/// V(x): g(x) outside the continuation region, k1*phi + k2*psi inside.
double evaluate(const Solution& solution, double x);

/// V(x) through its kernel representation: the integral of G(x, .) against
/// sigma over the stopping components.
double evaluate_integral(const DiffusionModel& model, const MeasureSpec& sigma,
                         const std::vector<Interval>& stopping, double x,
                         const QuadratureOptions& opts);

/// Max over the grid of |g(x) - integral of G(x,.) dsigma| for the measure
/// attached to the reward, plus the reward decay ratios at the window edges.
InversionReport verify_inversion(const DiffusionModel& model, const RewardSpec& reward,
                                 const std::vector<double>& grid, const SolverOptions& opts);

/// Runs every identity check against a solved problem. Reports only; never
/// throws on a failed identity.
VerificationReport verify_solution(const Solution& solution, const SolverOptions& opts);

} // namespace ostop
