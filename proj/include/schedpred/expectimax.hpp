#pragma once

#include "schedpred/domain.hpp"
#include "schedpred/rational.hpp"

#include <cstddef>

namespace schedpred {

inline constexpr std::size_t kDefaultExpectimaxBound = 6;

/// Exact expected cost of the best non-anticipating policy for n jobs
/// released at time zero with binary labels.
///
/// The decision tree is walked over states (unopened urgent-labelled,
/// unopened regular-labelled, interrupted regular jobs); jobs inside a label
/// class are exchangeable, so identities are dropped. Chance nodes draw the
/// label count from Binomial(n, P(pred = 0)) and the opened job's type from
/// its posterior. Cost accrues as elapsed time times the expected weight of
/// every unfinished job. Throws ResourceLimit when n exceeds `max_jobs`.
[[nodiscard]] BigRational expectimax_optimal(std::size_t n, const PredictionModel& model, const Parameters& params,
                                             std::size_t max_jobs = kDefaultExpectimaxBound);

/// Expected cost of the threshold rule with the given threshold on the same
/// tree (open iff the head's posterior exceeds it).
[[nodiscard]] BigRational threshold_rule_expected_cost(std::size_t n, const PredictionModel& model,
                                                       const Parameters& params, const Rational& threshold,
                                                       std::size_t max_jobs = kDefaultExpectimaxBound);

/// threshold_rule_expected_cost at the policy's own beta.
[[nodiscard]] BigRational beta_rule_expected_cost(std::size_t n, const PredictionModel& model,
                                                  const Parameters& params,
                                                  std::size_t max_jobs = kDefaultExpectimaxBound);

}  // namespace schedpred
