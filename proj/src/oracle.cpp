#include "ostop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "ostop/errors.hpp"

namespace ostop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// The maximal open gap of the stop set containing x, clipped to the state
/// space.
Interval gap_around(const StoppingPolicy& policy, const Interval& domain, double x) {
    double lo = domain.lo, hi = domain.hi;
    for (const Interval& iv : policy.stop_set) {
        if (iv.hi <= x)
            lo = std::max(lo, iv.hi);
        else if (iv.lo >= x)
            hi = std::min(hi, iv.lo);
    }
    return {lo, hi};
}

} // namespace

OracleEstimate policy_value(const DiffusionModel& model, const RealFn& g,
                            const StoppingPolicy& policy, double x) {
    model.require_inside(x, "policy_value");
    if (policy.stops_at(x))
        return {g(x), 0.0};

    const Interval domain = model.domain();
    const Interval gap = gap_around(policy, domain, x);
    if (gap == domain)
        return {0.0, 0.0}; // never stops

    auto [k1, k2] = coefficients(model, g, gap);
    return {k1 * model.phi(x) + k2 * model.psi(x), 0.0};
}

BruteForceResult brute_force(const DiffusionModel& model, const RealFn& g,
                             const std::vector<int>& gap_counts, Interval window,
                             double grid_step, const std::vector<double>& eval_points) {
    if (!(grid_step > 0.0) || !window.bounded() || !(window.lo < window.hi))
        throw InvalidParameterError("brute_force: need a bounded window and positive step");
    const int n = static_cast<int>(std::floor(window.width() / grid_step)) + 1;
    if (n > 20000)
        throw BudgetError("brute_force: grid too fine; increase the step");

    const int max_gaps = gap_counts.empty()
                             ? 0
                             : *std::max_element(gap_counts.begin(), gap_counts.end());

    std::vector<double> xs(n), phis(n), psis(n), gs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = window.lo + i * grid_step;
        model.require_inside(xs[i], "brute_force");
        phis[i] = model.phi(xs[i]);
        psis[i] = model.psi(xs[i]);
        gs[i] = g(xs[i]);
    }

    BruteForceResult result;
    for (double x : eval_points) {
        model.require_inside(x, "brute_force");
        BruteForcePoint point;
        point.x = x;
        point.best_value = g(x); // stopping immediately / x outside every gap
        if (max_gaps >= 1) {
            const double phi_x = model.phi(x), psi_x = model.psi(x);
            for (int ia = 0; ia < n; ++ia) {
                if (xs[ia] >= x)
                    break;
                for (int ib = n - 1; ib > ia; --ib) {
                    if (xs[ib] <= x)
                        break;
                    const double denom = psis[ia] * phis[ib] - psis[ib] * phis[ia];
                    if (std::abs(denom) < 1e-300)
                        continue;
                    const double k1 = (gs[ib] * psis[ia] - gs[ia] * psis[ib]) / denom;
                    const double k2 = (gs[ia] * phis[ib] - gs[ib] * phis[ia]) / denom;
                    const double value = k1 * phi_x + k2 * psi_x;
                    if (value > point.best_value) {
                        point.best_value = value;
                        point.best_gap = Interval{xs[ia], xs[ib]};
                    }
                }
            }
        }
        result.points.push_back(point);
    }
    return result;
}

OracleEstimate monte_carlo_value(const DiffusionModel& model, const RealFn& g,
                                 const StoppingPolicy& policy, double x, int n_paths,
                                 double dt, std::uint64_t seed) {
    if (!model.brownian_params())
        throw InvalidParameterError("monte_carlo_value: only the Brownian family is simulated");
    if (n_paths <= 1 || !(dt > 0.0))
        throw InvalidParameterError("monte_carlo_value: need n_paths > 1 and dt > 0");
    model.require_inside(x, "monte_carlo_value");

    const double drift = model.brownian_params()->drift;
    const double vol = model.brownian_params()->volatility;
    const double alpha = model.alpha();
    const double step_discount = std::exp(-alpha * dt);
    const double sqrt_dt = std::sqrt(dt);
    constexpr double kDiscountCutoff = 1e-9;

    // First boundary of the stop set crossed by the segment from `from` to
    // `to`, or nothing when the segment stays clear.
    auto first_crossing = [&policy](double from, double to) -> std::optional<double> {
        const double lo = std::min(from, to), hi = std::max(from, to);
        std::optional<double> best;
        double best_dist = kInf;
        for (const Interval& iv : policy.stop_set) {
            for (double b : {iv.lo, iv.hi}) {
                if (!std::isfinite(b) || b < lo || b > hi)
                    continue;
                const double dist = std::abs(b - from);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = b;
                }
            }
        }
        return best;
    };

    auto run_chunk = [&](std::uint64_t chunk_seed, int paths, double& sum, double& sum_sq) {
        std::mt19937_64 rng(chunk_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        for (int p = 0; p < paths; ++p) {
            double pos = x;
            double discount = 1.0;
            double payoff = 0.0;
            if (policy.stops_at(pos)) {
                payoff = g(pos);
            } else {
                Interval gap = gap_around(policy, model.domain(), pos);
                while (discount > kDiscountCutoff) {
                    const double next = pos + drift * dt + vol * sqrt_dt * normal(rng);
                    const auto crossed = first_crossing(pos, next);
                    if (crossed) {
                        const double theta = (next == pos)
                                                 ? 1.0
                                                 : std::clamp((*crossed - pos) / (next - pos),
                                                              0.0, 1.0);
                        payoff = discount * std::pow(step_discount, theta) * g(*crossed);
                        break;
                    }
                    // Same-side excursion: probability a Brownian bridge
                    // touched a gap boundary between the grid times.
                    double p_hi = 0.0, p_lo = 0.0;
                    if (std::isfinite(gap.hi))
                        p_hi = std::exp(-2.0 * (gap.hi - pos) * (gap.hi - next) /
                                        (vol * vol * dt));
                    if (std::isfinite(gap.lo))
                        p_lo = std::exp(-2.0 * (pos - gap.lo) * (next - gap.lo) /
                                        (vol * vol * dt));
                    if (p_hi + p_lo > 1e-14) {
                        const double u = uniform(rng);
                        if (u < p_hi + p_lo) {
                            const double boundary = u < p_hi ? gap.hi : gap.lo;
                            payoff = discount * std::pow(step_discount, 0.5) * g(boundary);
                            break;
                        }
                    }
                    pos = next;
                    discount *= step_discount;
                }
            }
            sum += payoff;
            sum_sq += payoff * payoff;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int n_chunks = static_cast<int>(std::min<unsigned>(hw, 4));
    std::vector<double> sums(n_chunks, 0.0), sums_sq(n_chunks, 0.0);
    std::vector<int> sizes(n_chunks, n_paths / n_chunks);
    sizes[0] += n_paths % n_chunks;

    std::vector<std::thread> workers;
    for (int c = 0; c < n_chunks; ++c)
        workers.emplace_back([&, c] {
            run_chunk(seed + 0x9E3779B97F4A7C15ull * (c + 1), sizes[c], sums[c], sums_sq[c]);
        });
    for (std::thread& t : workers)
        t.join();

    double sum = 0.0, sum_sq = 0.0;
    for (int c = 0; c < n_chunks; ++c) {
        sum += sums[c];
        sum_sq += sums_sq[c];
    }
    const double mean = sum / n_paths;
    const double var = std::max(0.0, (sum_sq - n_paths * mean * mean) / (n_paths - 1));
    return {mean, std::sqrt(var / n_paths)};
}

} // namespace ostop
