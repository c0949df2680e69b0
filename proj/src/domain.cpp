#include "schedpred/domain.hpp"

#include "schedpred/errors.hpp"
#include "schedpred/rng.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace schedpred {

JobType job_type_from_int(int v) {
    if (v == 0) return JobType::Urgent;
    if (v == 1) return JobType::Regular;
    throw std::invalid_argument("job type must be 0 or 1, got " + std::to_string(v));
}

Parameters::Parameters(Rational alpha, Rational w0, Rational w1)
    : alpha_(alpha), w0_(w0), w1_(w1) {
    if (!(alpha_ > Rational(0) && alpha_ < Rational(1))) {
        throw std::domain_error("alpha must lie in (0, 1), got " + alpha_.str());
    }
    if (!(w1_ > Rational(0) && w0_ > w1_)) {
        throw std::domain_error("weights must satisfy w0 > w1 > 0, got w0=" + w0_.str() + " w1=" + w1_.str());
    }
}

Rational Parameters::beta() const { return (alpha_ / (Rational(1) - alpha_)) * (w1_ / (w0_ - w1_)); }

bool Parameters::preemption_can_pay() const { return w1_ < w0_ * (Rational(1) - alpha_); }

PredictionModel::PredictionModel(Rational rho, Rational eps0, Rational eps1)
    : rho_(rho), eps0_(eps0), eps1_(eps1) {
    const Rational half(1, 2);
    if (!(rho_ > Rational(0) && rho_ < Rational(1))) {
        throw std::domain_error("rho must lie in (0, 1), got " + rho_.str());
    }
    if (eps0_ < Rational(0) || eps0_ > half || eps1_ < Rational(0) || eps1_ > half) {
        throw std::domain_error("error rates must lie in [0, 1/2], got eps0=" + eps0_.str() + " eps1=" + eps1_.str());
    }
}

Rational PredictionModel::prob_predicted_urgent() const {
    return (Rational(1) - eps0_) * rho_ + eps1_ * (Rational(1) - rho_);
}

Rational posterior(const PredictionModel& model, Label label) {
    const Rational one(1);
    if (label == Label::Urgent) {
        const Rational hit = (one - model.eps0()) * model.rho();
        return hit / (hit + model.eps1() * (one - model.rho()));
    }
    const Rational miss = model.eps0() * model.rho();
    return miss / (miss + (one - model.eps1()) * (one - model.rho()));
}

Instance::Instance(std::vector<Job> jobs, Parameters params, std::optional<PredictionModel> model)
    : jobs_(std::move(jobs)), params_(params), model_(std::move(model)) {
    if (jobs_.empty()) throw InvalidInstance("instance needs at least one job");

    mode_ = jobs_.front().has_label() ? PredictionMode::Binary : PredictionMode::Probabilistic;
    std::unordered_set<JobId> seen;
    seen.reserve(jobs_.size());
    for (const Job& job : jobs_) {
        if (!seen.insert(job.id).second) {
            throw InvalidInstance("duplicate job id " + std::to_string(job.id));
        }
        if (job.has_label() != (mode_ == PredictionMode::Binary)) {
            throw InvalidInstance("instance mixes binary labels and probability estimates (job " +
                                  std::to_string(job.id) + ")");
        }
        if (!job.has_label() && (job.probability() < Rational(0) || job.probability() > Rational(1))) {
            throw InvalidInstance("probability estimate outside [0, 1] for job " + std::to_string(job.id));
        }
        if (job.release_time < Rational(0)) {
            throw InvalidInstance("negative release time for job " + std::to_string(job.id));
        }
    }
    if (mode_ == PredictionMode::Binary && !model_) {
        throw InvalidInstance("binary labels require a prediction model");
    }
}

std::size_t Instance::urgent_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.true_type == JobType::Urgent; }));
}

bool Instance::all_released_at_zero() const noexcept {
    return std::all_of(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.release_time.is_zero(); });
}

Rational Instance::prior(const Job& job) const {
    if (job.has_label()) return posterior(*model_, job.label());
    return job.probability();
}

Instance Instance::with_release_times(std::span<const Rational> releases) const {
    if (releases.size() != jobs_.size()) throw InvalidInstance("release vector size does not match job count");
    std::vector<Job> jobs = jobs_;
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i].release_time = releases[i];
    return Instance(std::move(jobs), params_, model_);
}

Instance sample_instance(std::size_t n, const PredictionModel& model, const Parameters& params, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_instance needs n >= 1");
    Rng rng(seed);
    std::vector<Job> jobs(n);
    for (std::size_t i = 0; i < n; ++i) {
        Job& job = jobs[i];
        job.id = static_cast<JobId>(i + 1);
        const bool urgent = bernoulli(rng, model.rho());
        job.true_type = urgent ? JobType::Urgent : JobType::Regular;
        const bool flip = bernoulli(rng, urgent ? model.eps0() : model.eps1());
        const bool predicted_urgent = urgent != flip;
        job.prediction = predicted_urgent ? Label::Urgent : Label::Regular;
    }
    return Instance(std::move(jobs), params, model);
}

std::vector<Job> sort_for_policy(const Instance& instance) {
    struct Keyed {
        Rational prior;
        Job job;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(instance.size());
    for (const Job& job : instance.jobs()) keyed.push_back({instance.prior(job), job});
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        const int ra = label_rank(a.job.has_label() ? std::optional<Label>(a.job.label()) : std::nullopt);
        const int rb = label_rank(b.job.has_label() ? std::optional<Label>(b.job.label()) : std::nullopt);
        return policy_order(a.prior, ra, a.job.id, b.prior, rb, b.job.id);
    });
    std::vector<Job> out;
    out.reserve(keyed.size());
    for (auto& k : keyed) out.push_back(std::move(k.job));
    return out;
}

}  // namespace schedpred
