#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "ostop/diffusion.hpp"
#include "ostop/measure.hpp"

namespace ostop {

/// Reward regular enough for the kernel identity: (alpha - L)g is supplied
/// directly as a function.
struct SmoothReward {
    RealFn alpha_minus_generator; // x -> (alpha - L)g(x)
};

/// Reward given through its representing measure nu, i.e.
/// g(x) = integral of G(x, .) against nu over the state space.
struct RepresentedReward {
    MeasureSpec nu;
};

/// Continuous reward g together with either route to its representing
/// measure. `exceptional_points` lists the finitely many kinks of g where
/// (alpha - L)g need not be evaluable.
struct RewardSpec {
    RealFn g;
    std::variant<SmoothReward, RepresentedReward> kind;
    std::vector<double> exceptional_points;

    static RewardSpec smooth(RealFn g, RealFn alpha_minus_generator,
                             std::vector<double> exceptional_points = {}) {
        return {std::move(g), SmoothReward{std::move(alpha_minus_generator)},
                std::move(exceptional_points)};
    }

    static RewardSpec represented(RealFn g, MeasureSpec nu,
                                  std::vector<double> exceptional_points = {}) {
        return {std::move(g), RepresentedReward{std::move(nu)},
                std::move(exceptional_points)};
    }

    bool is_smooth() const noexcept {
        return std::holds_alternative<SmoothReward>(kind);
    }
};

/// The measure every integral in the method runs against: for a smooth
/// reward the density (alpha - L)g times the speed density, for a
/// represented reward nu itself.
MeasureSpec reward_sigma(const DiffusionModel& model, const RewardSpec& reward);

} // namespace ostop
