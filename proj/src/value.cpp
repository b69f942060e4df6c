#include "ostop/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

const IntervalSolution* find_interval(const Solution& s, double x) {
    for (const IntervalSolution& iv : s.intervals)
        if (iv.c.contains(x))
            return &iv;
    return nullptr;
}

/// Interior sample grid of n points, offset half a step from the edges.
std::vector<double> interior_grid(Interval iv, int n) {
    std::vector<double> xs;
    xs.reserve(n);
    for (int i = 0; i < n; ++i)
        xs.push_back(iv.lo + iv.width() * (i + 0.5) / n);
    return xs;
}

} // namespace

std::vector<Interval> stopping_region(const Interval& domain,
                                      const std::vector<IntervalSolution>& intervals) {
    std::vector<Interval> out;
    double cursor = domain.lo;
    for (const IntervalSolution& iv : intervals) {
        if (cursor < iv.c.lo)
            out.push_back({cursor, iv.c.lo});
        cursor = iv.c.hi;
    }
    if (cursor < domain.hi)
        out.push_back({cursor, domain.hi});
    return out;
}

std::pair<double, double> coefficients(const DiffusionModel& model, const RealFn& g,
                                       Interval c) {
    const Interval domain = model.domain();
    const bool left_boundary = c.lo == domain.lo;
    const bool right_boundary = c.hi == domain.hi;
    if (left_boundary && right_boundary)
        throw InvalidParameterError("coefficients: interval spans the whole state space");

    if (left_boundary)
        return {0.0, g(c.hi) / model.psi(c.hi)};
    if (right_boundary)
        return {g(c.lo) / model.phi(c.lo), 0.0};

    const double psi_lo = model.psi(c.lo), psi_hi = model.psi(c.hi);
    const double phi_lo = model.phi(c.lo), phi_hi = model.phi(c.hi);
    const double denom = psi_lo * phi_hi - psi_hi * phi_lo;
    if (std::abs(denom) < 1e-300)
        throw InvalidParameterError("coefficients: degenerate continuation interval");
    const double g_lo = g(c.lo), g_hi = g(c.hi);
    const double k1 = (g_hi * psi_lo - g_lo * psi_hi) / denom;
    const double k2 = (g_lo * phi_hi - g_hi * phi_lo) / denom;
    return {k1, k2};
}

double evaluate(const Solution& solution, double x) {
    solution.model.require_inside(x, "evaluate");
    if (const IntervalSolution* iv = find_interval(solution, x))
        return iv->k1 * solution.model.phi(x) + iv->k2 * solution.model.psi(x);
    return solution.reward.g(x);
}

double evaluate_integral(const DiffusionModel& model, const MeasureSpec& sigma,
                         const std::vector<Interval>& stopping, double x,
                         const QuadratureOptions& opts) {
    model.require_inside(x, "evaluate_integral");
    double total = 0.0;
    for (const Interval& s : stopping)
        total += green_integral(model, sigma, s, x, opts);
    return total;
}

InversionReport verify_inversion(const DiffusionModel& model, const RewardSpec& reward,
                                 const std::vector<double>& grid, const SolverOptions& opts) {
    const MeasureSpec sigma = reward_sigma(model, reward);
    InversionReport rep;
    for (double x : grid) {
        const double lhs = reward.g(x);
        const double rhs = green_integral(model, sigma, model.domain(), x, opts.quadrature);
        rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
    }
    const Interval win = opts.work_window.intersect(model.domain());
    rep.decay_ratio_left = std::abs(reward.g(win.lo)) / model.phi(win.lo);
    rep.decay_ratio_right = std::abs(reward.g(win.hi)) / model.psi(win.hi);
    return rep;
}

VerificationReport verify_solution(const Solution& solution, const SolverOptions& opts) {
    const DiffusionModel& model = solution.model;
    const RealFn& g = solution.reward.g;
    const Interval domain = model.domain();
    const Interval win = opts.work_window.intersect(domain);
    constexpr int kGridPoints = 401;

    VerificationReport rep;
    rep.majorant_min_gap = std::numeric_limits<double>::infinity();
    if (solution.intervals.empty())
        rep.majorant_min_gap = 0.0;

    // Majorant gap over continuation interiors (V == g on the rest).
    for (const IntervalSolution& iv : solution.intervals) {
        const Interval clipped = iv.c.intersect(win);
        if (!(clipped.lo < clipped.hi))
            continue;
        for (double x : interior_grid(clipped, kGridPoints)) {
            const double gap = evaluate(solution, x) - g(x);
            rep.majorant_min_gap = std::min(rep.majorant_min_gap, gap);
        }
    }

    if (!std::isfinite(rep.majorant_min_gap))
        rep.majorant_min_gap = 0.0; // nothing sampled inside the window

    // V vs g over the stopping region; zero by construction of evaluate.
    for (const Interval& s : stopping_region(domain, solution.intervals)) {
        const Interval clipped = s.intersect(win);
        if (!(clipped.lo < clipped.hi))
            continue;
        for (double x : interior_grid(clipped, kGridPoints)) {
            const double gap = std::abs(evaluate(solution, x) - g(x));
            rep.stop_region_max_gap = std::max(rep.stop_region_max_gap, gap);
        }
    }

    // Smooth fit: second-order one-sided difference quotients across every
    // finite contact point (first-order quotients would drown the jump in
    // h*V'' truncation error at exponential scale).
    const double h_fit = 1e-5;
    for (const IntervalSolution& iv : solution.intervals) {
        for (double b : {iv.c.lo, iv.c.hi}) {
            if (!std::isfinite(b) || b == domain.lo || b == domain.hi)
                continue;
            auto v = [&](double x) { return evaluate(solution, x); };
            const double right = (-3.0 * v(b) + 4.0 * v(b + h_fit) - v(b + 2.0 * h_fit)) /
                                 (2.0 * h_fit);
            const double left = (3.0 * v(b) - 4.0 * v(b - h_fit) + v(b - 2.0 * h_fit)) /
                                (2.0 * h_fit);
            rep.smooth_fit_max = std::max(rep.smooth_fit_max, std::abs(right - left));
        }
    }

    // alpha*V = LV on continuation interiors, with L through the Feller
    // second difference built from scale and speed densities.
    for (const IntervalSolution& iv : solution.intervals) {
        const Interval clipped = iv.c.intersect(win);
        if (!(clipped.lo < clipped.hi))
            continue;
        for (double x : interior_grid(clipped, kGridPoints)) {
            const double h = 1e-4 * (1.0 + std::abs(x));
            if (x - h <= clipped.lo || x + h >= clipped.hi)
                continue;
            const double v_mid = evaluate(solution, x);
            const double ds_plus = model.scale_density(x + 0.5 * h) * h;
            const double ds_minus = model.scale_density(x - 0.5 * h) * h;
            const double dm = model.speed_density(x) * h;
            const double flux_plus = (evaluate(solution, x + h) - v_mid) / ds_plus;
            const double flux_minus = (v_mid - evaluate(solution, x - h)) / ds_minus;
            const double generator = (flux_plus - flux_minus) / dm;
            rep.harmonicity_max =
                std::max(rep.harmonicity_max, std::abs(model.alpha() * v_mid - generator));
        }
    }

    // Representing-measure identity on a grid spanning the finite contact
    // points (falls back to the window core when there are none).
    double grid_lo = win.lo * 0.5, grid_hi = win.hi * 0.5;
    bool have_finite = false;
    for (const IntervalSolution& iv : solution.intervals)
        for (double b : {iv.c.lo, iv.c.hi})
            if (std::isfinite(b)) {
                if (!have_finite) {
                    grid_lo = b;
                    grid_hi = b;
                    have_finite = true;
                } else {
                    grid_lo = std::min(grid_lo, b);
                    grid_hi = std::max(grid_hi, b);
                }
            }
    if (have_finite) {
        grid_lo = std::max(grid_lo - 1.0, win.lo);
        grid_hi = std::min(grid_hi + 1.0, win.hi);
    }
    InversionReport inv =
        verify_inversion(model, solution.reward, interior_grid({grid_lo, grid_hi}, 21), opts);
    rep.inversion_residual = inv.max_residual;
    return rep;
}

} // namespace ostop
