#pragma once

#include "schedpred/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace schedpred {

using JobId = std::uint32_t;

/// Urgent jobs carry weight w0, regular jobs w1.
enum class JobType : std::uint8_t { Urgent = 0, Regular = 1 };

/// Binary predicted label, same encoding as JobType.
using Label = JobType;

[[nodiscard]] constexpr int as_int(JobType t) noexcept { return static_cast<int>(t); }
[[nodiscard]] JobType job_type_from_int(int v);

/// Machine and cost physics: the revelation fraction alpha and the two
/// per-unit delay costs. The threshold beta is derived on demand.
class Parameters {
public:
    /// Requires 0 < alpha < 1 and w0 > w1 > 0.
    Parameters(Rational alpha, Rational w0, Rational w1);

    [[nodiscard]] const Rational& alpha() const noexcept { return alpha_; }
    [[nodiscard]] const Rational& w0() const noexcept { return w0_; }
    [[nodiscard]] const Rational& w1() const noexcept { return w1_; }

    /// (alpha / (1 - alpha)) * (w1 / (w0 - w1)).
    [[nodiscard]] Rational beta() const;

    /// w1 < w0 (1 - alpha); equivalently beta < 1.
    [[nodiscard]] bool preemption_can_pay() const;

    [[nodiscard]] const Rational& weight(JobType t) const noexcept {
        return t == JobType::Urgent ? w0_ : w1_;
    }

    friend bool operator==(const Parameters&, const Parameters&) = default;

private:
    Rational alpha_;
    Rational w0_;
    Rational w1_;
};

/// Confusion-matrix description of a binary urgency predictor.
class PredictionModel {
public:
    /// Requires 0 < rho < 1 and eps0, eps1 in [0, 1/2].
    PredictionModel(Rational rho, Rational eps0, Rational eps1);

    [[nodiscard]] const Rational& rho() const noexcept { return rho_; }
    /// False negative rate: P(pred = 1 | true = 0).
    [[nodiscard]] const Rational& eps0() const noexcept { return eps0_; }
    /// False positive rate: P(pred = 0 | true = 1).
    [[nodiscard]] const Rational& eps1() const noexcept { return eps1_; }

    /// P(pred = 0) = (1 - eps0) rho + eps1 (1 - rho).
    [[nodiscard]] Rational prob_predicted_urgent() const;

    friend bool operator==(const PredictionModel&, const PredictionModel&) = default;

private:
    Rational rho_;
    Rational eps0_;
    Rational eps1_;
};

/// P(true = 0 | pred = label) by Bayes' rule.
[[nodiscard]] Rational posterior(const PredictionModel& model, Label label);

/// Same as Parameters::beta, as a free function.
[[nodiscard]] inline Rational beta(const Parameters& params) { return params.beta(); }

/// A job's prediction is either a binary label or an estimated urgency
/// probability p-hat in [0, 1].
using Prediction = std::variant<Label, Rational>;

struct Job {
    JobId id = 0;
    JobType true_type = JobType::Regular;
    Prediction prediction = Label::Regular;
    Rational release_time{0};

    [[nodiscard]] bool has_label() const noexcept { return std::holds_alternative<Label>(prediction); }
    [[nodiscard]] Label label() const { return std::get<Label>(prediction); }
    [[nodiscard]] const Rational& probability() const { return std::get<Rational>(prediction); }
};

enum class PredictionMode { Binary, Probabilistic };

/// A batch of unit-time jobs with their predictions and cost parameters.
/// The model is required in binary mode and optional with a probabilistic
/// classifier.
class Instance {
public:
    /// Validates: at least one job, unique ids, a single prediction mode,
    /// p-hat in [0, 1], nonnegative release times, and a model when labels
    /// are used.
    Instance(std::vector<Job> jobs, Parameters params, std::optional<PredictionModel> model);

    [[nodiscard]] std::span<const Job> jobs() const noexcept { return jobs_; }
    [[nodiscard]] const Parameters& params() const noexcept { return params_; }
    [[nodiscard]] const std::optional<PredictionModel>& model() const noexcept { return model_; }
    [[nodiscard]] PredictionMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::size_t size() const noexcept { return jobs_.size(); }
    [[nodiscard]] std::size_t urgent_count() const noexcept;
    [[nodiscard]] bool all_released_at_zero() const noexcept;

    [[nodiscard]] const Rational& weight(const Job& job) const noexcept { return params_.weight(job.true_type); }

    /// Prior urgency probability used for sorting: the Bayes posterior of
    /// the label, or p-hat directly.
    [[nodiscard]] Rational prior(const Job& job) const;

    /// Copy with new release times (same order as jobs()).
    [[nodiscard]] Instance with_release_times(std::span<const Rational> releases) const;

private:
    std::vector<Job> jobs_;
    Parameters params_;
    std::optional<PredictionModel> model_;
    PredictionMode mode_ = PredictionMode::Binary;
};

/// n independent jobs: urgent with probability rho, label flipped from the
/// truth with probability eps0 (urgent) or eps1 (regular). Ids run 1..n and
/// all release times are zero. Pure function of its arguments.
[[nodiscard]] Instance sample_instance(std::size_t n, const PredictionModel& model, const Parameters& params,
                                       std::uint64_t seed);

/// Jobs in policy order, see policy_order.
[[nodiscard]] std::vector<Job> sort_for_policy(const Instance& instance);

/// 0 for a predicted-urgent label, 1 otherwise (regular label or p-hat).
[[nodiscard]] inline int label_rank(const std::optional<Label>& label) noexcept {
    return label == Label::Urgent ? 0 : 1;
}

/// Strict weak order used everywhere a queue is kept in policy order:
/// nonincreasing prior, then predicted-urgent labels first, then ascending
/// id. The label step only matters when both labels share a posterior.
[[nodiscard]] inline bool policy_order(const Rational& prior_a, int rank_a, JobId id_a, const Rational& prior_b,
                                       int rank_b, JobId id_b) {
    if (prior_a != prior_b) return prior_a > prior_b;
    if (rank_a != rank_b) return rank_a < rank_b;
    return id_a < id_b;
}

}  // namespace schedpred
