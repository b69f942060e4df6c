#pragma once

#include <functional>
#include <vector>

#include "ostop/diffusion.hpp"
#include "ostop/interval.hpp"

namespace ostop {

/// Point mass of a signed measure.
struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Signed measure on the state space: a density w.r.t. Lebesgue plus a
/// finite list of atoms. `breakpoints` lists the finitely many points where
/// the density is allowed to be non-smooth or undefined (reward kinks,
/// restriction boundaries); quadrature panels never straddle them.
struct MeasureSpec {
    RealFn density;
    std::vector<Atom> atoms;
    std::vector<double> breakpoints;
};

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 1 << 14;
    /// Unbounded ends are cut where |f(X)|*(1+|density(X)|) falls below this.
    double tail_epsilon = 1e-13;
    /// Never probe beyond |X| = tail_hard_limit when cutting tails.
    double tail_hard_limit = 1e3;
};

/// Integral of f against the measure over the open interval `over`:
/// adaptive Gauss-Kronrod on the density part plus the masses of the atoms
/// strictly inside. Unbounded ends are truncated by the tail rule above
/// (atoms are never dropped by truncation). Throws NumericError on a
/// non-finite integrand, AccuracyError when the subdivision budget runs out.
double integrate(const MeasureSpec& mu, const RealFn& f, Interval over,
                 const QuadratureOptions& opts);

/// The hybrid measure equal to sigma inside D and to sigma's positive part
/// outside: density zeroed on the negative components away from D, atoms
/// kept inside the closure of D and kept outside only when their mass is
/// non-negative. Closure membership lets a point seed [p,p] (and a merged
/// interval ending exactly on an atom) keep its defining mass.
MeasureSpec restrict_sigma(const MeasureSpec& sigma, Interval d,
                           std::vector<Interval> negative_set);

/// Total-variation companion: |density| and |masses|, same breakpoints.
/// Used to turn quadrature tolerances into magnitude scales.
MeasureSpec abs_measure(const MeasureSpec& mu);

} // namespace ostop
