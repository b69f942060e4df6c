#include "ostop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

constexpr double kConditionRelTol = 1e-6;

/// Integral against m over the open interval plus the masses of atoms
/// sitting exactly on a corrected endpoint, provided they belong to the
/// closure of the seed interval N. Keeps the point mass of a degenerate or
/// boundary-touching seed in play even though open-interval quadrature
/// would drop it.
double seeded_integral(const MeasureSpec& m, const RealFn& f, Interval over, Interval seed,
                       const QuadratureOptions& q, bool correct_lo = true,
                       bool correct_hi = true) {
    double v = integrate(m, f, over, q);
    for (const Atom& a : m.atoms) {
        const bool at_lo = correct_lo && a.location == over.lo;
        const bool at_hi = correct_hi && a.location == over.hi;
        if ((at_lo || at_hi) && seed.closure_contains(a.location))
            v += f(a.location) * a.mass;
    }
    return v;
}

struct SignScanResult {
    std::vector<Interval> components;
};

/// Uniform sign scan of `f` over the window followed by bisection
/// refinement of every sign change. Components touching a window edge are
/// extended to the state-space boundary when the sign persists there.
SignScanResult scan_negative(const RealFn& f, const Interval& domain,
                             const std::vector<double>& avoid, const SolverOptions& opts) {
    if (opts.scan_points < 100)
        throw InvalidParameterError("scan_points must be at least 100");
    Interval win = opts.work_window.intersect(domain);
    if (!(win.lo < win.hi) || !win.bounded())
        throw InvalidParameterError("work window must be a bounded interval inside the domain");
    // keep grid points strictly inside a finite state space
    if (win.lo == domain.lo)
        win.lo += 1e-9 * (1.0 + std::abs(win.lo));
    if (win.hi == domain.hi)
        win.hi -= 1e-9 * (1.0 + std::abs(win.hi));

    const int n = opts.scan_points;
    const double step = win.width() / (n - 1);

    auto eval = [&](double x) {
        for (double e : avoid)
            if (std::abs(x - e) < 1e-9 * (1.0 + std::abs(e)))
                x = e + 1e-9 * (1.0 + std::abs(e));
        const double v = f(x);
        if (!std::isfinite(v))
            throw NumericError("sign scan: non-finite value at x = " + std::to_string(x));
        return v;
    };

    std::vector<double> xs(n);
    std::vector<int> sign(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = win.lo + i * step;
        const double v = eval(xs[i]);
        sign[i] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    }

    auto bisect_change = [&](double a, double b) {
        // f(a) and f(b) have strictly opposite signs.
        double fa = eval(a);
        while (b - a > opts.root_tol * (1.0 + std::abs(a) + std::abs(b))) {
            const double mid = 0.5 * (a + b);
            const double fm = eval(mid);
            if (fm == 0.0)
                return mid;
            if ((fa < 0.0) == (fm < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    };

    SignScanResult out;
    int i = 0;
    while (i < n) {
        if (sign[i] != -1) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && sign[j + 1] == -1)
            ++j;

        double lo, hi;
        if (i == 0)
            lo = domain.lo; // sign persists at the scan edge
        else if (sign[i - 1] == 0)
            lo = xs[i - 1];
        else
            lo = bisect_change(xs[i - 1], xs[i]);
        if (j == n - 1)
            hi = domain.hi;
        else if (sign[j + 1] == 0)
            hi = xs[j + 1];
        else
            hi = bisect_change(xs[j], xs[j + 1]);

        out.components.push_back({lo, hi});
        if (out.components.size() > 64)
            throw ResolutionError("sign scan found more than 64 negative components; "
                                  "refine the grid or check the reward");
        i = j + 1;
    }
    return out;
}

} // namespace

MeasureSpec reward_sigma(const DiffusionModel& model, const RewardSpec& reward) {
    if (const auto* s = std::get_if<SmoothReward>(&reward.kind)) {
        MeasureSpec sigma;
        sigma.density = [alg = s->alpha_minus_generator, model](double x) {
            return alg(x) * model.speed_density(x);
        };
        sigma.breakpoints = reward.exceptional_points;
        return sigma;
    }
    return std::get<RepresentedReward>(reward.kind).nu;
}

std::vector<Interval> negative_set(const DiffusionModel& model, const RewardSpec& reward,
                                   const SolverOptions& opts) {
    const auto* s = std::get_if<SmoothReward>(&reward.kind);
    if (!s)
        throw InvalidParameterError("negative_set expects a smooth reward; "
                                    "use negative_support for represented rewards");
    return scan_negative(s->alpha_minus_generator, model.domain(), reward.exceptional_points,
                         opts)
        .components;
}

std::vector<NegativeComponent> negative_support(const DiffusionModel& model,
                                                const MeasureSpec& nu,
                                                const SolverOptions& opts) {
    auto intervals = scan_negative(nu.density, model.domain(), nu.breakpoints, opts).components;

    std::vector<NegativeComponent> out;
    out.reserve(intervals.size() + nu.atoms.size());
    for (const Interval& iv : intervals)
        out.push_back({iv, false});
    for (const Atom& a : nu.atoms) {
        if (a.mass >= 0.0)
            continue;
        if (!model.domain().contains(a.location))
            throw DomainError("negative atom outside the state space");
        const bool covered = std::any_of(intervals.begin(), intervals.end(), [&](const Interval& iv) {
            return iv.closure_contains(a.location);
        });
        if (!covered)
            out.push_back({Interval{a.location, a.location}, true});
    }
    std::sort(out.begin(), out.end(), [](const NegativeComponent& a, const NegativeComponent& b) {
        return a.interval.lo < b.interval.lo;
    });
    return out;
}

double green_integral(const DiffusionModel& model, const MeasureSpec& sigma, Interval over,
                      double x, const QuadratureOptions& opts) {
    const double w = model.wronskian();
    double total = 0.0;
    const double split_hi = std::min(x, over.hi);
    if (over.lo < split_hi)
        total += model.phi(x) / w * integrate(sigma, model.psi_fn(), {over.lo, split_hi}, opts);
    const double split_lo = std::max(x, over.lo);
    if (split_lo < over.hi)
        total += model.psi(x) / w * integrate(sigma, model.phi_fn(), {split_lo, over.hi}, opts);
    if (over.contains(x))
        for (const Atom& a : sigma.atoms)
            if (a.location == x)
                total += model.green(x, x) * a.mass;
    return total;
}

ConditionReport check_condition(const DiffusionModel& model, const MeasureSpec& sigma_n,
                                Interval n, Interval c, const SolverOptions& opts) {
    if (!n.subset_of(c))
        throw InvalidParameterError("check_condition: N must be contained in C");
    const QuadratureOptions& q = opts.quadrature;
    const Interval domain = model.domain();
    const MeasureSpec abs_n = abs_measure(sigma_n);
    const RealFn& phi = model.phi_fn();
    const RealFn& psi = model.psi_fn();

    auto tol = [&](double scale) { return 10.0 * q.abs_tol + kConditionRelTol * scale; };

    ConditionReport rep;
    rep.i_phi = seeded_integral(sigma_n, phi, n, n, q);
    rep.i_psi = seeded_integral(sigma_n, psi, n, n, q);
    const double scale_i_phi = seeded_integral(abs_n, phi, n, n, q);
    const double scale_i_psi = seeded_integral(abs_n, psi, n, n, q);
    bool ok = rep.i_phi <= tol(scale_i_phi) && rep.i_psi <= tol(scale_i_psi);

    rep.ii_applicable = domain.lo < c.lo;
    if (rep.ii_applicable) {
        rep.ii_residual = seeded_integral(sigma_n, phi, c, n, q);
        rep.ii_scale = seeded_integral(abs_n, phi, c, n, q);
        ok = ok && std::abs(rep.ii_residual) <= tol(rep.ii_scale);
    }
    rep.iii_applicable = c.hi < domain.hi;
    if (rep.iii_applicable) {
        rep.iii_residual = seeded_integral(sigma_n, psi, c, n, q);
        rep.iii_scale = seeded_integral(abs_n, psi, c, n, q);
        ok = ok && std::abs(rep.iii_residual) <= tol(rep.iii_scale);
    }

    // Kernel integral over a grid of interior points of C (clipped to the
    // work window when C is unbounded).
    const Interval grid = c.intersect(opts.work_window.intersect(domain));
    if (!(grid.lo < grid.hi)) {
        rep.satisfied = ok;
        return rep;
    }
    const int m = std::max(opts.condition_grid, 3);
    const double w = model.wronskian();
    const double a_psi = seeded_integral(abs_n, psi, {c.lo, grid.hi}, n, q, true, false);
    const double a_phi = seeded_integral(abs_n, phi, {grid.lo, c.hi}, n, q, false, true);
    rep.iv_max = -std::numeric_limits<double>::infinity();
    bool ok_iv = true;
    for (int k = 0; k < m; ++k) {
        const double x = grid.lo + grid.width() * (k + 0.5) / m;
        double val = 0.0;
        if (c.lo < x)
            val += model.phi(x) / w * seeded_integral(sigma_n, psi, {c.lo, x}, n, q, true, false);
        if (x < c.hi)
            val += model.psi(x) / w * seeded_integral(sigma_n, phi, {x, c.hi}, n, q, false, true);
        for (const Atom& a : sigma_n.atoms)
            if (a.location == x)
                val += model.green(x, x) * a.mass;
        const double scale = (model.phi(x) * a_psi + model.psi(x) * a_phi) / w;
        rep.iv_max = std::max(rep.iv_max, val);
        ok_iv = ok_iv && val <= tol(scale);
    }
    rep.satisfied = ok && ok_iv;
    return rep;
}

Interval enlarge(const DiffusionModel& model, const MeasureSpec& sigma, Interval n,
                 const std::vector<Interval>& negative_set, const SolverOptions& opts,
                 ConditionReport* report) {
    const Interval domain = model.domain();
    const QuadratureOptions& q = opts.quadrature;
    if (!(n.lo <= n.hi) || !domain.closure_contains(n.lo) || !domain.closure_contains(n.hi))
        throw InvalidParameterError("enlarge: seed interval outside the state space");

    const MeasureSpec sigma_n = restrict_sigma(sigma, n, negative_set);
    const MeasureSpec abs_n = abs_measure(sigma_n);
    const RealFn& phi = model.phi_fn();
    const RealFn& psi = model.psi_fn();

    const double i_phi = seeded_integral(sigma_n, phi, n, n, q);
    const double i_psi = seeded_integral(sigma_n, psi, n, n, q);
    const double scale_phi = seeded_integral(abs_n, phi, n, n, q);
    const double scale_psi = seeded_integral(abs_n, psi, n, n, q);
    if (i_phi > 10.0 * q.abs_tol + kConditionRelTol * scale_phi ||
        i_psi > 10.0 * q.abs_tol + kConditionRelTol * scale_psi)
        throw InvalidParameterError(
            "enlarge: seed interval does not carry negative phi/psi mass");

    // Rescale phi so both seed integrals coincide; the zero crossings do
    // not depend on the constant, so a degenerate phi-integral simply skips it.
    const double c_scale = std::abs(i_phi) > 100.0 * q.abs_tol ? i_psi / i_phi : 1.0;
    const RealFn phi_s = [phi, c_scale](double x) { return c_scale * phi(x); };

    const Interval win = opts.work_window.intersect(domain);
    const double bracket_lo = std::max(win.lo, domain.lo);
    const double bracket_hi = std::min(win.hi, domain.hi);

    const bool left_movable = n.lo > domain.lo;
    const bool right_movable = n.hi < domain.hi;
    double x = n.lo, y = n.hi;

    // Boundary between {F < 0} and {F >= 0}; zneg has F < 0, zpos F >= 0.
    auto bisect_boundary = [&](const std::function<double(double)>& f, double zneg,
                               double zpos) {
        while (std::abs(zneg - zpos) >
               opts.root_tol * (1.0 + std::abs(zneg) + std::abs(zpos))) {
            const double mid = 0.5 * (zneg + zpos);
            if (f(mid) < 0.0)
                zneg = mid;
            else
                zpos = mid;
        }
        return 0.5 * (zneg + zpos);
    };

    auto moved = [&](double a, double b) {
        if (a == b)
            return false;
        if (!std::isfinite(a) || !std::isfinite(b))
            return true;
        return std::abs(a - b) > opts.enlarge_tol * (1.0 + std::abs(a));
    };

    bool converged = false;
    for (int iter = 0; iter < opts.max_enlarge_iters && !converged; ++iter) {
        const double x_prev = x, y_prev = y;

        if (left_movable) {
            auto f_left = [&](double z) {
                return seeded_integral(sigma_n, phi_s, {z, y}, n, q);
            };
            if (f_left(n.lo) >= 0.0)
                x = n.lo;
            else if (f_left(bracket_lo) < 0.0)
                x = domain.lo;
            else
                x = bisect_boundary(f_left, n.lo, bracket_lo);
        }
        if (right_movable) {
            auto f_right = [&](double z) {
                return seeded_integral(sigma_n, psi, {x, z}, n, q);
            };
            if (f_right(n.hi) >= 0.0)
                y = n.hi;
            else if (f_right(bracket_hi) < 0.0)
                y = domain.hi;
            else
                y = bisect_boundary(f_right, n.hi, bracket_hi);
        }

        converged = !moved(x_prev, x) && !moved(y_prev, y);
    }
    if (!converged)
        throw ConvergenceError("enlarge: endpoints still moving after max_enlarge_iters", x, y);

    const Interval c{x, y};
    if (c == domain) {
        // The pair (I, I) satisfies the conditions trivially; the caller
        // turns this into the degeneracy diagnosis.
        if (report)
            *report = ConditionReport{.satisfied = true};
        return c;
    }

    ConditionReport rep = check_condition(model, sigma_n, n, c, opts);
    if (!rep.satisfied)
        throw InternalConsistencyError("enlarge: widened interval fails the pair conditions");
    if (report)
        *report = rep;
    return c;
}

} // namespace ostop
