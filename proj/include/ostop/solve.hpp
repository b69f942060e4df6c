#pragma once

#include "ostop/solution.hpp"
#include "ostop/value.hpp"

namespace ostop {

/// Full pipeline: locate the negative components of the driving measure,
/// widen each one, then repeatedly replace boundary-reaching or
/// intersecting pairs by a single widened pair over their combined span
/// (the pair count drops every round, so the loop runs at most as many
/// times as there are components). Produces the continuation intervals
/// with their coefficients.
///
/// Throws DegeneracyError when a widened interval swallows the whole state
/// space, which the standing hypotheses exclude for admissible inputs.
Solution solve(const DiffusionModel& model, const RewardSpec& reward,
               const SolverOptions& opts);

} // namespace ostop
