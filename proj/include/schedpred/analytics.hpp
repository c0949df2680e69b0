#pragma once

#include "schedpred/domain.hpp"
#include "schedpred/policies.hpp"
#include "schedpred/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace schedpred {

/// Expected objective of each policy given n0 urgent jobs among n.
struct ConditionalExpectation {
    std::size_t n = 0;
    std::size_t n0 = 0;
    BigRational opt;
    BigRational nonpreemptive;
    BigRational preemptive;
    BigRational hybrid;
};

/// Pair counts underlying the closed forms, all conditional on n0:
/// X inversions (regular before urgent), Y regular pairs, and X0, Y0 the
/// same counts inside the urgent-labelled block.
struct PairExpectations {
    BigRational x;
    BigRational y;
    BigRational x0;
    BigRational y0;
};

[[nodiscard]] PairExpectations pair_expectations(std::size_t n, std::size_t n0, const PredictionModel& model);

/// Throws std::domain_error when n0 > n.
[[nodiscard]] ConditionalExpectation expected_conditional(std::size_t n, std::size_t n0, const PredictionModel& model,
                                                          const Parameters& params);

struct UnconditionalExpectation {
    std::size_t n = 0;
    BigRational opt;
    BigRational nonpreemptive;
    BigRational preemptive;
    BigRational hybrid;
    BigRational beta;  ///< The regime's value: what the beta rule achieves.
    Regime regime = Regime::Hybrid;
};

/// Exact Binomial(n, rho) mixture of expected_conditional.
[[nodiscard]] UnconditionalExpectation expected_unconditional(std::size_t n, const PredictionModel& model,
                                                              const Parameters& params);

/// A competitive ratio with the adversarial urgent fraction that attains it
/// in the large-n limit (nullopt when the ratio is flat in q).
struct RatioBound {
    double value = 1.0;
    std::optional<double> worst_q;
};

/// 1 + eps (sqrt(w0/w1) - 1), eps the mean error rate.
[[nodiscard]] RatioBound cr_nonpreemptive(const PredictionModel& model, const Parameters& params);

/// 1 + eps (sqrt(1/(1 - alpha)) - 1): the bound that applies to the
/// nonpreemptive schedule when w1 >= w0 (1 - alpha).
[[nodiscard]] double cr_nonpreemptive_without_assumption(const PredictionModel& model, const Parameters& params);

/// 1 + alpha for eps <= w1/w0, otherwise the interior maximum.
[[nodiscard]] RatioBound cr_preemptive(const PredictionModel& model, const Parameters& params);

struct HybridRatio {
    RatioBound bound;
    double lambda = 0.0;
    /// 1 + (lambda/2)(sqrt(w0/w1) - 1) + (alpha eps1^2/2)(1 + sqrt(w0/(w0-w1))).
    double decomposition_bound = 1.0;
};

[[nodiscard]] HybridRatio cr_hybrid(const PredictionModel& model, const Parameters& params);

/// lambda = eps0(1 + eps1) + (alpha w0/(w0-w1)) eps1 (1-eps0) - (alpha w1/(w0-w1)) eps1^2, exactly.
[[nodiscard]] Rational hybrid_lambda(const PredictionModel& model, const Parameters& params);

/// Large-n limits of E(ALG | n0 = q n) / OPT - 1, one per policy.
[[nodiscard]] double limiting_excess_nonpreemptive(double q, const PredictionModel& model, const Parameters& params);
[[nodiscard]] double limiting_excess_preemptive(double q, const PredictionModel& model, const Parameters& params);
[[nodiscard]] double limiting_excess_hybrid(double q, const PredictionModel& model, const Parameters& params);

struct CompetitiveRatioReport {
    RatioBound nonpreemptive;
    RatioBound preemptive;
    HybridRatio hybrid;
    Regime regime = Regime::Hybrid;
    double beta_rule = 1.0;  ///< The ratio selected by the regime.
};

[[nodiscard]] CompetitiveRatioReport beta_competitive_ratio(const PredictionModel& model, const Parameters& params);

/// max(1 + alpha, 2/(1 + alpha)) for the beta rule with true types known at
/// release and jobs arriving over time.
[[nodiscard]] double alg0_cr_bound(double alpha);

inline constexpr double kLogLossClamp = 1e-12;

struct LogLoss {
    double eta = 0.0;
    std::size_t clamped = 0;  ///< Jobs whose estimate was pulled into [delta, 1 - delta].
};

/// Cross-entropy of the probability estimates against the true types
/// (natural log). Requires a probabilistic-mode instance.
[[nodiscard]] LogLoss log_loss(const Instance& instance, double delta = kLogLossClamp);

/// Flat JSON object: inputs as exact fractions, outputs as 12 significant
/// digit decimal strings.
[[nodiscard]] std::string report_json(const PredictionModel& model, const Parameters& params, std::size_t n);

}  // namespace schedpred
