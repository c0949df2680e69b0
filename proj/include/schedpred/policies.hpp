#pragma once

#include "schedpred/domain.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace schedpred {

/// An unopened job as the policy sees it: id, prior urgency probability and
/// (binary mode) its predicted label.
struct QueuedJob {
    JobId id = 0;
    Rational prior;
    std::optional<Label> label;
};

/// A partially processed job with 1 - alpha work left and posterior
/// urgency theta (0 under exact revelation).
struct InterruptedJob {
    JobId id = 0;
    Rational theta;
};

/// Read-only view of the decision state.
///
/// `unopened` is in policy order (head first) and holds released jobs only.
/// `interrupted` is in interruption order, oldest first.
struct PolicyState {
    std::span<const QueuedJob> unopened;
    std::span<const InterruptedJob> interrupted;
    Rational clock;

    [[nodiscard]] bool terminal() const noexcept { return unopened.empty() && interrupted.empty(); }
};

struct Action {
    enum class Kind { OpenNext, CompleteLow };

    Kind kind = Kind::OpenNext;
    JobId job = 0;  ///< Interrupted job to finish, CompleteLow only.

    [[nodiscard]] static Action open_next() noexcept { return {Kind::OpenNext, 0}; }
    [[nodiscard]] static Action complete_low(JobId id) noexcept { return {Kind::CompleteLow, id}; }

    friend bool operator==(const Action&, const Action&) = default;
};

/// What the machine learns at an alpha-point.
///
/// Exact: the true type (theta = 1 for urgent, 0 for regular).
/// Probabilistic: theta drawn from Beta(a, b) for urgent jobs and Beta(b, a)
/// for regular ones, quantized to a grid of 1/theta_grid.
struct RevelationModel {
    enum class Mode { Exact, Probabilistic };

    Mode mode = Mode::Exact;
    double a = 4.0;
    double b = 1.0;
    std::int64_t theta_grid = 1'000'000;

    [[nodiscard]] static RevelationModel exact() noexcept { return {}; }
    [[nodiscard]] static RevelationModel probabilistic(double a, double b) noexcept {
        return {Mode::Probabilistic, a, b, 1'000'000};
    }
};

enum class PolicyKind { Nonpreemptive, Preemptive, Hybrid, BetaThreshold, ModifiedBeta };

[[nodiscard]] PolicyKind policy_from_string(std::string_view name);
[[nodiscard]] std::string_view to_string(PolicyKind kind) noexcept;

/// Algorithm 1: finish an interrupted job (FIFO) when the head's prior is at
/// most beta, otherwise open the head. Forced moves when either side is empty.
[[nodiscard]] Action beta_threshold_decide(const PolicyState& state, const Parameters& params);

/// Same rule against an explicit threshold (used to inject faults in the
/// verification harness).
[[nodiscard]] Action threshold_decide(const PolicyState& state, const Rational& threshold);

/// Opens while anything is unopened. The engine never stops this policy at
/// an alpha-point, see continues_at_alpha_point.
[[nodiscard]] Action nonpreemptive_decide(const PolicyState& state, const Parameters& params);

/// Opens while anything is unopened; completes interrupted work (FIFO) only
/// once the unopened queue is empty.
[[nodiscard]] Action preemptive_decide(const PolicyState& state, const Parameters& params);

/// Preempts while the head is predicted urgent and switches to finishing
/// interrupted work at the first predicted-regular head. Binary labels only.
[[nodiscard]] Action hybrid_decide(const PolicyState& state, const Parameters& params);

/// Threshold beta + (alpha/(1-alpha)) (w0/(w0-w1)) theta/(1-theta), where
/// theta is the largest posterior among interrupted jobs; theta = 1 means an
/// infinite threshold. Ties in theta go to the earliest interrupted job.
[[nodiscard]] Action modified_beta_decide(const PolicyState& state, const Parameters& params);

/// The modified threshold itself; nullopt stands for +infinity (theta = 1).
[[nodiscard]] std::optional<Rational> modified_threshold(const Parameters& params, const Rational& theta);

[[nodiscard]] Action decide(PolicyKind kind, const PolicyState& state, const Parameters& params);

/// True when the policy never preempts, so the engine completes every
/// opened job without consulting it at the alpha-point.
[[nodiscard]] constexpr bool continues_at_alpha_point(PolicyKind kind) noexcept {
    return kind == PolicyKind::Nonpreemptive;
}

enum class Regime { Nonpreemptive, Preemptive, Hybrid };

[[nodiscard]] std::string_view to_string(Regime regime) noexcept;

/// Which behaviour the beta rule exhibits, from the closed-form condition
/// rho(1-beta)eps0 + beta(1-rho)eps1 < min(rho(1-beta), beta(1-rho)).
[[nodiscard]] Regime classify_regime(const PredictionModel& model, const Parameters& params);

/// Same classification through the posterior sandwich
/// P(0 | pred 1) <= beta < P(0 | pred 0).
[[nodiscard]] Regime classify_regime_by_posteriors(const PredictionModel& model, const Parameters& params);

/// cmu form of the threshold test: E(w) / 1 > w1 / (1 - alpha).
[[nodiscard]] bool cmu_prefers_opening(const Rational& prior, const Parameters& params);

}  // namespace schedpred
