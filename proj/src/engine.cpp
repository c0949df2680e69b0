#include "schedpred/engine.hpp"

#include "schedpred/errors.hpp"
#include "schedpred/rng.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace schedpred {

std::string_view to_string(TraceEvent::Kind kind) noexcept {
    switch (kind) {
        case TraceEvent::Kind::Open: return "open";
        case TraceEvent::Kind::AlphaReveal: return "alpha_reveal";
        case TraceEvent::Kind::Complete: return "complete";
        case TraceEvent::Kind::Preempt: return "preempt";
    }
    return "unknown";
}

const Rational& RunOutcome::completion_of(JobId id) const {
    for (std::size_t i = 0; i < job_ids.size(); ++i) {
        if (job_ids[i] == id) return completion_times[i];
    }
    throw std::out_of_range("no completion recorded for job " + std::to_string(id));
}

void write_trace(std::ostream& os, std::span<const TraceEvent> trace) {
    for (const TraceEvent& e : trace) {
        os << e.time.str() << ',' << to_string(e.kind) << ',' << e.job << ',' << as_int(e.true_type) << '\n';
    }
}

namespace {

/// Mutable machine state for one online run.
class OnlineRun {
public:
    OnlineRun(const Instance& instance, const DecisionRule& rule, bool continue_at_alpha,
              const RevelationModel& revelation, const RunOptions& options)
        : instance_(instance),
          jobs_(instance.jobs()),
          rule_(rule),
          continue_at_alpha_(continue_at_alpha),
          revelation_(revelation),
          options_(options),
          rng_(options.revelation_seed),
          alpha_(instance.params().alpha()),
          rest_(Rational(1) - alpha_) {
        const std::size_t n = jobs_.size();
        priors_.reserve(n);
        for (const Job& job : jobs_) priors_.push_back(instance.prior(job));
        by_release_.resize(n);
        std::iota(by_release_.begin(), by_release_.end(), std::size_t{0});
        std::stable_sort(by_release_.begin(), by_release_.end(), [&](std::size_t a, std::size_t b) {
            if (jobs_[a].release_time != jobs_[b].release_time) return jobs_[a].release_time < jobs_[b].release_time;
            return jobs_[a].id < jobs_[b].id;
        });
        outcome_.job_ids.reserve(n);
        for (const Job& job : jobs_) outcome_.job_ids.push_back(job.id);
        outcome_.completion_times.assign(n, Rational(0));
        unopened_.reserve(n);
        unopened_idx_.reserve(n);
    }

    RunOutcome execute() {
        const std::size_t n = jobs_.size();
        while (completed_ < n) {
            admit_released();
            if (head_ == unopened_.size() && interrupted_.empty()) {
                // idle until the next release
                clock_ = std::max(clock_, jobs_[by_release_[next_release_]].release_time);
                continue;
            }
            const PolicyState state{std::span<const QueuedJob>(unopened_).subspan(head_), interrupted_, clock_};
            const Action action = rule_(state);
            apply(action);
        }
        return std::move(outcome_);
    }

private:
    void admit_released() {
        while (next_release_ < by_release_.size() && jobs_[by_release_[next_release_]].release_time <= clock_) {
            const std::size_t idx = by_release_[next_release_++];
            const Job& job = jobs_[idx];
            QueuedJob q{job.id, priors_[idx], job.has_label() ? std::optional<Label>(job.label()) : std::nullopt};
            auto pos = std::upper_bound(unopened_.begin() + static_cast<std::ptrdiff_t>(head_), unopened_.end(), q,
                                        [](const QueuedJob& a, const QueuedJob& b) {
                                            return policy_order(a.prior, label_rank(a.label), a.id, b.prior,
                                                                label_rank(b.label), b.id);
                                        });
            const auto offset = pos - unopened_.begin();
            unopened_.insert(pos, q);
            unopened_idx_.insert(unopened_idx_.begin() + offset, idx);
        }
    }

    void apply(const Action& action) {
        if (just_revealed_) {
            const bool continues = action.kind == Action::Kind::CompleteLow && action.job == *just_revealed_;
            if (!continues) {
                record(TraceEvent::Kind::Preempt, interrupted_idx_.back());
                ++outcome_.preemption_count;
            }
            just_revealed_.reset();
        }

        if (action.kind == Action::Kind::OpenNext) {
            if (head_ == unopened_.size()) violation("OpenNext with no released unopened job");
            open(unopened_idx_[head_++]);
            if (head_ > 64 && head_ * 2 > unopened_.size()) compact();
            return;
        }

        auto it = std::find_if(interrupted_.begin(), interrupted_.end(),
                               [&](const InterruptedJob& j) { return j.id == action.job; });
        if (it == interrupted_.end()) violation("CompleteLow for job " + std::to_string(action.job) + " which is not interrupted");
        const auto pos = it - interrupted_.begin();
        const std::size_t idx = interrupted_idx_[static_cast<std::size_t>(pos)];
        interrupted_.erase(it);
        interrupted_idx_.erase(interrupted_idx_.begin() + pos);
        clock_ += rest_;
        complete(idx);
    }

    void open(std::size_t idx) {
        const Job& job = jobs_[idx];
        record(TraceEvent::Kind::Open, idx);
        clock_ += alpha_;
        record(TraceEvent::Kind::AlphaReveal, idx);

        const bool exact = revelation_.mode == RevelationModel::Mode::Exact;
        if (continue_at_alpha_ || (exact && job.true_type == JobType::Urgent)) {
            clock_ += rest_;
            complete(idx);
            return;
        }
        interrupted_.push_back({job.id, reveal(job)});
        interrupted_idx_.push_back(idx);
        just_revealed_ = job.id;
    }

    Rational reveal(const Job& job) {
        if (revelation_.mode == RevelationModel::Mode::Exact) {
            return job.true_type == JobType::Urgent ? Rational(1) : Rational(0);
        }
        const bool urgent = job.true_type == JobType::Urgent;
        const double theta = urgent ? beta_variate(rng_, revelation_.a, revelation_.b)
                                    : beta_variate(rng_, revelation_.b, revelation_.a);
        return Rational::from_double(theta, revelation_.theta_grid);
    }

    void complete(std::size_t idx) {
        outcome_.completion_times[idx] = clock_;
        outcome_.total_cost += instance_.weight(jobs_[idx]) * clock_;
        ++completed_;
        record(TraceEvent::Kind::Complete, idx);
    }

    void compact() {
        unopened_.erase(unopened_.begin(), unopened_.begin() + static_cast<std::ptrdiff_t>(head_));
        unopened_idx_.erase(unopened_idx_.begin(), unopened_idx_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
    }

    void record(TraceEvent::Kind kind, std::size_t idx) {
        if (!options_.record_trace) return;
        outcome_.trace.push_back({clock_, kind, jobs_[idx].id, jobs_[idx].true_type});
    }

    [[noreturn]] void violation(const std::string& what) const {
        std::ostringstream msg;
        msg << "policy contract violation at t=" << clock_.str() << ": " << what;
        if (!outcome_.trace.empty()) {
            msg << "; recent events:";
            const std::size_t from = outcome_.trace.size() > 5 ? outcome_.trace.size() - 5 : 0;
            for (std::size_t i = from; i < outcome_.trace.size(); ++i) {
                const TraceEvent& e = outcome_.trace[i];
                msg << ' ' << e.time.str() << ':' << to_string(e.kind) << ':' << e.job;
            }
        }
        throw ContractViolation(msg.str());
    }

    const Instance& instance_;
    std::span<const Job> jobs_;
    const DecisionRule& rule_;
    bool continue_at_alpha_;
    RevelationModel revelation_;
    RunOptions options_;
    Rng rng_;
    Rational alpha_;
    Rational rest_;

    std::vector<Rational> priors_;
    std::vector<std::size_t> by_release_;
    std::size_t next_release_ = 0;

    std::vector<QueuedJob> unopened_;
    std::vector<std::size_t> unopened_idx_;
    std::size_t head_ = 0;

    std::vector<InterruptedJob> interrupted_;
    std::vector<std::size_t> interrupted_idx_;
    std::optional<JobId> just_revealed_;

    Rational clock_{0};
    std::size_t completed_ = 0;
    RunOutcome outcome_;
};

void check_two_weights(std::span<const WeightedJob> jobs) {
    std::vector<Rational> distinct;
    for (const WeightedJob& j : jobs) {
        if (!(j.weight > Rational(0))) throw UnsupportedInput("job weights must be positive");
        if (std::find(distinct.begin(), distinct.end(), j.weight) == distinct.end()) distinct.push_back(j.weight);
    }
    if (distinct.size() > 2) {
        throw UnsupportedInput("WSRPT optimality needs at most two distinct weights, got " +
                               std::to_string(distinct.size()));
    }
}

Rational next_release_after(std::span<const WeightedJob> jobs, const Rational& t, bool& found) {
    found = false;
    Rational best;
    for (const WeightedJob& j : jobs) {
        if (j.release > t && (!found || j.release < best)) {
            best = j.release;
            found = true;
        }
    }
    return best;
}

struct SearchState {
    std::span<const WeightedJob> jobs;
    std::vector<Rational> remaining;
    std::optional<Rational> best;
};

void search(SearchState& s, const Rational& t, const Rational& cost, std::size_t left) {
    if (left == 0) {
        if (!s.best || cost < *s.best) s.best = cost;
        return;
    }
    bool has_next = false;
    const Rational next = next_release_after(s.jobs, t, has_next);
    bool any = false;
    for (std::size_t i = 0; i < s.jobs.size(); ++i) {
        if (s.remaining[i].is_zero() || s.jobs[i].release > t) continue;
        any = true;
        const Rational saved = s.remaining[i];
        Rational end = t + saved;
        if (has_next && next < end) end = next;
        s.remaining[i] -= end - t;
        if (s.remaining[i].is_zero()) {
            search(s, end, cost + s.jobs[i].weight * end, left - 1);
        } else {
            search(s, end, cost, left);
        }
        s.remaining[i] = saved;
    }
    if (!any) search(s, next, cost, left);  // idle until the next release
}

}  // namespace

RunOutcome run_with_rule(const Instance& instance, const DecisionRule& rule, bool continue_at_alpha,
                         const RevelationModel& revelation, const RunOptions& options) {
    OnlineRun state(instance, rule, continue_at_alpha, revelation, options);
    return state.execute();
}

RunOutcome run(const Instance& instance, PolicyKind policy, const RevelationModel& revelation,
               const RunOptions& options) {
    const Parameters& params = instance.params();
    if (policy == PolicyKind::Hybrid && instance.mode() != PredictionMode::Binary) {
        throw std::invalid_argument("hybrid policy needs binary predicted labels");
    }
    const DecisionRule rule = [policy, &params](const PolicyState& s) { return decide(policy, s, params); };
    return run_with_rule(instance, rule, continues_at_alpha_point(policy), revelation, options);
}

Rational offline_wspt_cost(std::size_t n, std::size_t n0, const Parameters& params) {
    const auto tri = [](std::size_t k) { return Rational(static_cast<std::int64_t>(k * (k + 1) / 2)); };
    return (params.w0() - params.w1()) * tri(n0) + params.w1() * tri(n);
}

RunOutcome offline_wspt(const Instance& instance) {
    if (!instance.all_released_at_zero()) {
        throw UnsupportedInput("offline WSPT needs all release times at zero; use offline_wsrpt");
    }
    const auto jobs = instance.jobs();
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (jobs[a].true_type != jobs[b].true_type) return jobs[a].true_type == JobType::Urgent;
        return jobs[a].id < jobs[b].id;
    });

    RunOutcome out;
    out.job_ids.reserve(jobs.size());
    for (const Job& job : jobs) out.job_ids.push_back(job.id);
    out.completion_times.assign(jobs.size(), Rational(0));
    std::int64_t position = 0;
    for (std::size_t idx : order) {
        ++position;
        out.completion_times[idx] = Rational(position);
        out.total_cost += instance.weight(jobs[idx]) * Rational(position);
    }
    return out;
}

std::vector<WeightedJob> weighted_jobs(const Instance& instance) {
    std::vector<WeightedJob> out;
    out.reserve(instance.size());
    for (const Job& job : instance.jobs()) out.push_back({job.id, instance.weight(job), job.release_time});
    return out;
}

RunOutcome offline_wsrpt(std::span<const WeightedJob> jobs, bool record_trace) {
    check_two_weights(jobs);
    const std::size_t n = jobs.size();
    std::vector<Rational> remaining(n, Rational(1));
    std::vector<bool> started(n, false);

    RunOutcome out;
    out.completion_times.assign(n, Rational(0));
    for (const WeightedJob& j : jobs) out.job_ids.push_back(j.id);

    const auto trace = [&](const Rational& t, TraceEvent::Kind kind, std::size_t i) {
        if (record_trace) out.trace.push_back({t, kind, jobs[i].id, JobType::Regular});
    };

    Rational t(0);
    std::size_t done = 0;
    std::size_t running = n;  // n means idle
    while (done < n) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < n; ++i) {
            if (remaining[i].is_zero() || jobs[i].release > t) continue;
            if (!best) {
                best = i;
                continue;
            }
            const std::size_t b = *best;
            // compare w_i / x_i against w_b / x_b without dividing
            const auto lhs = jobs[i].weight * remaining[b];
            const auto rhs = jobs[b].weight * remaining[i];
            if (lhs > rhs || (lhs == rhs && (remaining[i] < remaining[b] ||
                                              (remaining[i] == remaining[b] && jobs[i].id < jobs[b].id)))) {
                best = i;
            }
        }
        bool has_next = false;
        const Rational next = next_release_after(jobs, t, has_next);
        if (!best) {
            t = next;
            running = n;
            continue;
        }
        const std::size_t i = *best;
        if (running != n && running != i && !remaining[running].is_zero()) {
            trace(t, TraceEvent::Kind::Preempt, running);
            ++out.preemption_count;
        }
        if (!started[i]) {
            started[i] = true;
            trace(t, TraceEvent::Kind::Open, i);
        }
        running = i;
        Rational end = t + remaining[i];
        if (has_next && next < end) end = next;
        remaining[i] -= end - t;
        t = end;
        if (remaining[i].is_zero()) {
            ++done;
            out.completion_times[i] = t;
            out.total_cost += jobs[i].weight * t;
            trace(t, TraceEvent::Kind::Complete, i);
            running = n;
        }
    }
    return out;
}

RunOutcome offline_wsrpt(const Instance& instance, bool record_trace) {
    const auto jobs = weighted_jobs(instance);
    RunOutcome out = offline_wsrpt(jobs, record_trace);
    for (TraceEvent& e : out.trace) {
        for (const Job& job : instance.jobs()) {
            if (job.id == e.job) e.true_type = job.true_type;
        }
    }
    return out;
}

Rational enumerate_offline_optimum(std::span<const WeightedJob> jobs, std::size_t max_jobs) {
    if (jobs.size() > max_jobs) {
        throw ResourceLimit("exhaustive search limited to " + std::to_string(max_jobs) + " jobs, got " +
                            std::to_string(jobs.size()));
    }
    check_two_weights(jobs);
    SearchState s{jobs, std::vector<Rational>(jobs.size(), Rational(1)), std::nullopt};
    search(s, Rational(0), Rational(0), jobs.size());
    return *s.best;
}

Rational enumerate_offline_optimum(const Instance& instance, std::size_t max_jobs) {
    const auto jobs = weighted_jobs(instance);
    return enumerate_offline_optimum(jobs, max_jobs);
}

}  // namespace schedpred
