#include "ostop/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double kronrod = 0.0;
    double error = 0.0;
    double resabs = 0.0;
};

struct Panel {
    double a, b;
    double value;
    double error;
    double resabs;
    bool operator<(const Panel& other) const { return error < other.error; }
};

double eval_integrand(const MeasureSpec& mu, const RealFn& f, double x) {
    const double v = f(x) * mu.density(x);
    if (!std::isfinite(v))
        throw NumericError("integrand not finite at x = " + std::to_string(x));
    return v;
}

PanelResult gauss_kronrod(const MeasureSpec& mu, const RealFn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    fv[7] = eval_integrand(mu, f, c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = eval_integrand(mu, f, c - h * kXgk[i]);
        fv[14 - i] = eval_integrand(mu, f, c + h * kXgk[i]);
    }

    double kron = kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    double resabs = kWgk[7] * std::abs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        kron += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    for (int i = 0; i < 3; ++i)
        gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    const double mean = 0.5 * kron;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    PanelResult r;
    r.kronrod = kron * h;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    double err = std::abs((kron - gauss) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    err = std::max(err, 50.0 * eps * resabs);
    r.error = err;
    r.resabs = resabs;
    return r;
}

// Probe outward from `from` in direction `dir` (+1/-1) and return the point
// where the density integral may be cut. Cuts at the first probe where the
// crude bound |f|*(1+|density|) drops under tail_epsilon; if the bound
// instead grows far past its running minimum the integrand is not decaying
// and the cut is placed at that minimum.
double truncation_point(const MeasureSpec& mu, const RealFn& f, double from, int dir,
                        const QuadratureOptions& opts) {
    const double cap = opts.tail_hard_limit;
    double x = from;
    double best_x = from;
    double best_bound = std::numeric_limits<double>::infinity();
    double prev_bound = std::numeric_limits<double>::infinity();
    constexpr double kGrowthGuard = 1e6;

    while (std::abs(x) < cap) {
        const double step = std::max(0.5, 0.25 * (1.0 + std::abs(x)));
        x += dir * step;
        if (std::abs(x) > cap)
            x = dir * cap;
        double bound;
        const double fx = f(x), dx = mu.density(x);
        if (!std::isfinite(fx) || !std::isfinite(dx))
            bound = std::numeric_limits<double>::infinity();
        else
            bound = std::abs(fx) * (1.0 + std::abs(dx));
        if (bound < opts.tail_epsilon)
            return x;
        if (bound < best_bound) {
            best_bound = bound;
            best_x = x;
        } else if (bound > prev_bound && bound > kGrowthGuard * best_bound) {
            return best_x;
        }
        prev_bound = bound;
    }
    return dir > 0 ? cap : -cap;
}

} // namespace

double integrate(const MeasureSpec& mu, const RealFn& f, Interval over,
                 const QuadratureOptions& opts) {
    if (!(over.lo <= over.hi))
        throw InvalidParameterError("integrate: inverted interval");
    if (opts.max_subdivisions < 16 || !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) ||
        !(opts.tail_epsilon > 0.0))
        throw InvalidParameterError("integrate: quadrature options out of range");

    double atom_sum = 0.0;
    for (const Atom& a : mu.atoms)
        if (over.contains(a.location))
            atom_sum += f(a.location) * a.mass;

    // Cut unbounded ends for the density part.
    double lo = over.lo, hi = over.hi;
    if (!std::isfinite(hi)) {
        const double from = std::isfinite(lo) ? lo : 0.0;
        hi = truncation_point(mu, f, from, +1, opts);
    }
    if (!std::isfinite(lo))
        lo = truncation_point(mu, f, std::min(hi, 0.0), -1, opts);
    if (!(lo < hi))
        return atom_sum;

    // Initial panels split at breakpoints and atom locations so the density
    // is smooth inside every panel.
    std::vector<double> cuts{lo, hi};
    for (double b : mu.breakpoints)
        if (lo < b && b < hi)
            cuts.push_back(b);
    for (const Atom& a : mu.atoms)
        if (lo < a.location && a.location < hi)
            cuts.push_back(a.location);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> queue;
    double total = 0.0, total_err = 0.0, total_resabs = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const PanelResult r = gauss_kronrod(mu, f, cuts[i], cuts[i + 1]);
        queue.push({cuts[i], cuts[i + 1], r.kronrod, r.error, r.resabs});
        total += r.kronrod;
        total_err += r.error;
        total_resabs += r.resabs;
    }

    // Requested tolerances below the roundoff floor of the absolute
    // integral are unattainable; terminate there instead.
    const double eps = std::numeric_limits<double>::epsilon();
    auto tolerance = [&] {
        return std::max({opts.abs_tol, opts.rel_tol * std::abs(total),
                         100.0 * eps * total_resabs});
    };

    int splits = 0;
    while (total_err > tolerance()) {
        if (queue.empty())
            break; // every remaining panel is too narrow to split
        if (splits >= opts.max_subdivisions)
            throw AccuracyError("integrate: subdivision budget exhausted", total + atom_sum,
                                total_err);
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a < 50.0 * eps * (1.0 + std::abs(mid)))
            continue; // keep its value and error as-is
        ++splits;
        const PanelResult left = gauss_kronrod(mu, f, worst.a, mid);
        const PanelResult right = gauss_kronrod(mu, f, mid, worst.b);
        total += left.kronrod + right.kronrod - worst.value;
        total_err += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        queue.push({worst.a, mid, left.kronrod, left.error, left.resabs});
        queue.push({mid, worst.b, right.kronrod, right.error, right.resabs});
    }

    return total + atom_sum;
}

MeasureSpec restrict_sigma(const MeasureSpec& sigma, Interval d,
                           std::vector<Interval> negative_set) {
    MeasureSpec out;
    out.density = [base = sigma.density, d, neg = negative_set](double x) -> double {
        if (d.closure_contains(x))
            return base(x);
        for (const Interval& n : neg)
            if (n.contains(x))
                return 0.0;
        return base(x);
    };
    for (const Atom& a : sigma.atoms) {
        // Closure membership: a point seed [p,p] owns its atom, and so does
        // a merged interval ending exactly on one.
        if (d.closure_contains(a.location) || a.mass >= 0.0)
            out.atoms.push_back(a);
    }
    out.breakpoints = sigma.breakpoints;
    auto add_break = [&out](double b) {
        if (std::isfinite(b))
            out.breakpoints.push_back(b);
    };
    add_break(d.lo);
    add_break(d.hi);
    for (const Interval& n : negative_set) {
        add_break(n.lo);
        add_break(n.hi);
    }
    std::sort(out.breakpoints.begin(), out.breakpoints.end());
    out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end()),
                          out.breakpoints.end());
    return out;
}

MeasureSpec abs_measure(const MeasureSpec& mu) {
    MeasureSpec out;
    out.density = [base = mu.density](double x) { return std::abs(base(x)); };
    out.atoms = mu.atoms;
    for (Atom& a : out.atoms)
        a.mass = std::abs(a.mass);
    out.breakpoints = mu.breakpoints;
    return out;
}

} // namespace ostop
