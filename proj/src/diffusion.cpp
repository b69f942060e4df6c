#include "ostop/diffusion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

void check_monotone_positive(const DiffusionModel& m, const Interval& window, int n) {
    const double span = window.width();
    double prev_phi = 0.0, prev_psi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = window.lo + span * (i + 0.5) / n;
        const double p = m.phi(x);
        const double q = m.psi(x);
        if (!(p > 0.0) || !(q > 0.0))
            throw InvalidParameterError("fundamental solutions must be strictly positive");
        if (i > 0 && (p >= prev_phi || q <= prev_psi))
            throw InvalidParameterError(
                "fundamental solutions must be strictly monotone (dec/inc)");
        prev_phi = p;
        prev_psi = q;
    }
}

void check_wronskian_constancy(const DiffusionModel& m, const Interval& window, int n) {
    const double span = window.width();
    for (int i = 0; i < n; ++i) {
        const double x = window.lo + span * (i + 0.5) / n;
        const double w = m.finite_difference_wronskian(x);
        if (std::abs(w - m.wronskian()) > 1e-6 * std::abs(m.wronskian()))
            throw InvalidParameterError(
                "finite-difference wronskian deviates more than 1e-6 relative at x = " +
                std::to_string(x));
    }
}

} // namespace

DiffusionModel DiffusionModel::brownian(double alpha, double drift, double volatility) {
    if (!(alpha > 0.0))
        throw InvalidParameterError("discount rate must be positive");
    if (!(volatility > 0.0))
        throw InvalidParameterError("volatility must be positive");

    const double v2 = volatility * volatility;
    const double disc = std::sqrt(drift * drift + 2.0 * v2 * alpha);
    const double gamma_pos = (-drift + disc) / v2;
    const double gamma_neg = (-drift - disc) / v2;
    const double scale_rate = -2.0 * drift / v2; // s'(x) = exp(scale_rate * x)

    DiffusionModel m;
    m.domain_ = Interval::whole_line();
    m.alpha_ = alpha;
    m.psi_ = [gamma_pos](double x) { return std::exp(gamma_pos * x); };
    m.phi_ = [gamma_neg](double x) { return std::exp(gamma_neg * x); };
    m.scale_density_ = [scale_rate](double x) { return std::exp(scale_rate * x); };
    m.speed_density_ = [v2, scale_rate](double x) {
        return 2.0 / (v2 * std::exp(scale_rate * x));
    };
    // (psi'/s')phi - psi(phi'/s') collapses to gamma_pos - gamma_neg = 2*disc/v2.
    m.wronskian_ = 2.0 * disc / v2;
    m.bparams_ = BrownianParams{drift, volatility};
    return m;
}

DiffusionModel DiffusionModel::custom(Interval domain, double alpha,
                                      RealFn decreasing_solution, RealFn increasing_solution,
                                      RealFn scale_density, RealFn speed_density,
                                      double reference_x, Interval check_window,
                                      int check_points) {
    if (!(alpha > 0.0))
        throw InvalidParameterError("discount rate must be positive");
    if (!(domain.lo < domain.hi))
        throw InvalidParameterError("state space must be a nonempty open interval");
    if (!domain.contains(reference_x))
        throw InvalidParameterError("wronskian reference point must lie inside the state space");
    check_window = check_window.intersect(domain);
    if (!(check_window.lo < check_window.hi))
        throw InvalidParameterError("check window must intersect the state space");

    DiffusionModel m;
    m.domain_ = domain;
    m.alpha_ = alpha;
    m.phi_ = std::move(decreasing_solution);
    m.psi_ = std::move(increasing_solution);
    m.scale_density_ = std::move(scale_density);
    m.speed_density_ = std::move(speed_density);
    m.wronskian_ = m.finite_difference_wronskian(reference_x);
    if (!(m.wronskian_ > 0.0) || !std::isfinite(m.wronskian_))
        throw InvalidParameterError("wronskian estimate is not a positive finite number");

    check_monotone_positive(m, check_window, check_points);
    check_wronskian_constancy(m, check_window, check_points);
    return m;
}

double DiffusionModel::green(double x, double y) const {
    require_inside(x, "green");
    require_inside(y, "green");
    const double lo = std::min(x, y);
    const double hi = std::max(x, y);
    return psi_(lo) * phi_(hi) / wronskian_;
}

double DiffusionModel::laplace_hitting(double x, double z) const {
    require_inside(x, "laplace_hitting");
    require_inside(z, "laplace_hitting");
    if (x == z)
        return 1.0;
    return x < z ? psi_(x) / psi_(z) : phi_(x) / phi_(z);
}

double DiffusionModel::finite_difference_wronskian(double x, double step_scale) const {
    const double h = step_scale * (1.0 + std::abs(x));
    const double sp = scale_density_(x);
    const double dpsi = (psi_(x + h) - psi_(x - h)) / (2.0 * h);
    const double dphi = (phi_(x + h) - phi_(x - h)) / (2.0 * h);
    return (dpsi / sp) * phi_(x) - psi_(x) * (dphi / sp);
}

void DiffusionModel::require_inside(double x, const char* what) const {
    if (!domain_.contains(x))
        throw DomainError(std::string(what) + ": argument " + std::to_string(x) +
                          " outside the state space");
}

} // namespace ostop
