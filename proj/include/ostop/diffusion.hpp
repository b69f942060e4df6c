#pragma once

#include <functional>
#include <optional>

#include "ostop/interval.hpp"

namespace ostop {

using RealFn = std::function<double(double)>;

/// Parameters of the Brownian family dX = drift dt + volatility dW, kept on
/// the model so path simulation can recover them.
struct BrownianParams {
    double drift = 0.0;
    double volatility = 1.0;
};

/// A regular one-dimensional diffusion on an open interval, described by
/// its two positive fundamental solutions of alpha*u = Lu (decreasing
/// `dec`, increasing `inc`), the scale and speed densities, and the
/// discount rate alpha. Immutable after construction; all queries are pure.
class DiffusionModel {
public:
    /// Empty model; assign one of the factory results before use.
    DiffusionModel() = default;

    /// Brownian motion with drift on the whole line. inc/dec are the
    /// exponentials exp(g*x) with g the positive/negative root of
    /// (vol^2/2) g^2 + drift g - alpha = 0.
    static DiffusionModel brownian(double alpha, double drift, double volatility);

    /// Standard Brownian motion (drift 0, volatility 1): speed density 2,
    /// scale density 1, wronskian 2*sqrt(2*alpha).
    static DiffusionModel standard_brownian(double alpha) {
        return brownian(alpha, 0.0, 1.0);
    }

    /// Arbitrary diffusion through user-supplied handles. The wronskian is
    /// estimated once at `reference_x` by central differences and its
    /// x-independence is verified on a grid spanning `check_window`.
    static DiffusionModel custom(Interval domain, double alpha,
                                 RealFn decreasing_solution, RealFn increasing_solution,
                                 RealFn scale_density, RealFn speed_density,
                                 double reference_x, Interval check_window,
                                 int check_points = 50);

    const Interval& domain() const noexcept { return domain_; }
    double alpha() const noexcept { return alpha_; }
    double wronskian() const noexcept { return wronskian_; }
    const std::optional<BrownianParams>& brownian_params() const noexcept { return bparams_; }

    /// Decreasing fundamental solution.
    double phi(double x) const { return phi_(x); }
    /// Increasing fundamental solution.
    double psi(double x) const { return psi_(x); }
    double scale_density(double x) const { return scale_density_(x); }
    double speed_density(double x) const { return speed_density_(x); }

    const RealFn& phi_fn() const noexcept { return phi_; }
    const RealFn& psi_fn() const noexcept { return psi_; }

    /// Green kernel w^{-1} psi(x and y in increasing order) phi(the other).
    /// Symmetric in (x, y). Throws DomainError outside the state space.
    double green(double x, double y) const;

    /// Laplace transform E_x[exp(-alpha * hitting time of z)]; equals
    /// psi(x)/psi(z) below z, phi(x)/phi(z) above, 1 at z.
    double laplace_hitting(double x, double z) const;

    /// Wronskian (d inc/ds) dec - inc (d dec/ds) estimated by central
    /// differences at x with step h = step_scale*(1+|x|).
    double finite_difference_wronskian(double x, double step_scale = 1e-6) const;

    void require_inside(double x, const char* what) const;

private:
    Interval domain_;
    double alpha_ = 0.0;
    RealFn phi_;
    RealFn psi_;
    RealFn scale_density_;
    RealFn speed_density_;
    double wronskian_ = 0.0;
    std::optional<BrownianParams> bparams_;
};

} // namespace ostop
