#pragma once

#include "schedpred/domain.hpp"
#include "schedpred/policies.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace schedpred {

struct TraceEvent {
    enum class Kind { Open, AlphaReveal, Complete, Preempt };

    Rational time;
    Kind kind = Kind::Open;
    JobId job = 0;
    JobType true_type = JobType::Regular;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

[[nodiscard]] std::string_view to_string(TraceEvent::Kind kind) noexcept;

/// Result of one schedule. `completion_times[i]` belongs to `job_ids[i]`,
/// in the order of the input instance.
struct RunOutcome {
    std::vector<JobId> job_ids;
    std::vector<Rational> completion_times;
    Rational total_cost;
    std::vector<TraceEvent> trace;  ///< Empty unless tracing was requested.
    std::size_t preemption_count = 0;

    /// Throws std::out_of_range for an unknown id.
    [[nodiscard]] const Rational& completion_of(JobId id) const;
};

struct RunOptions {
    bool record_trace = false;
    /// Seeds theta draws under probabilistic revelation.
    std::uint64_t revelation_seed = 0;
};

using DecisionRule = std::function<Action(const PolicyState&)>;

/// Event-driven single machine with alpha-point revelation.
///
/// Decision points are job completions, alpha-points of jobs that may be
/// preempted, and release times while the machine is idle. Jobs released
/// while the machine is busy join the unopened queue (in prior order) at the
/// next decision point. Under exact revelation an urgent job runs straight
/// to completion. Throws ContractViolation when the rule picks an illegal
/// action.
[[nodiscard]] RunOutcome run(const Instance& instance, PolicyKind policy,
                             const RevelationModel& revelation = RevelationModel::exact(),
                             const RunOptions& options = {});

/// Same engine driven by an arbitrary rule. With `continue_at_alpha` the
/// engine never stops at alpha-points.
[[nodiscard]] RunOutcome run_with_rule(const Instance& instance, const DecisionRule& rule, bool continue_at_alpha,
                                       const RevelationModel& revelation = RevelationModel::exact(),
                                       const RunOptions& options = {});

/// Offline optimum without release dates: urgent jobs first (ties by id),
/// job in position j completes at time j. Throws UnsupportedInput for any
/// nonzero release time.
[[nodiscard]] RunOutcome offline_wspt(const Instance& instance);

/// (w0 - w1) n0 (n0 + 1)/2 + w1 n (n + 1)/2.
[[nodiscard]] Rational offline_wspt_cost(std::size_t n, std::size_t n0, const Parameters& params);

/// A job for the offline preemptive problems, where only weight and release
/// date matter.
struct WeightedJob {
    JobId id = 0;
    Rational weight;
    Rational release;
};

[[nodiscard]] std::vector<WeightedJob> weighted_jobs(const Instance& instance);

/// Preemptive weighted shortest remaining processing time. At each release
/// and completion the available job with the largest weight / remaining
/// work runs; ties go to less remaining work, then the smaller id. Throws
/// UnsupportedInput for more than two distinct weights.
[[nodiscard]] RunOutcome offline_wsrpt(std::span<const WeightedJob> jobs, bool record_trace = false);
[[nodiscard]] RunOutcome offline_wsrpt(const Instance& instance, bool record_trace = false);

inline constexpr std::size_t kDefaultEnumerationBound = 4;

/// Exhaustive minimum over preemptive schedules that only switch jobs at
/// release dates and completions. Throws ResourceLimit above `max_jobs`.
[[nodiscard]] Rational enumerate_offline_optimum(std::span<const WeightedJob> jobs,
                                                 std::size_t max_jobs = kDefaultEnumerationBound);
[[nodiscard]] Rational enumerate_offline_optimum(const Instance& instance,
                                                 std::size_t max_jobs = kDefaultEnumerationBound);

/// `t,event,job_id,true_type` per line, times as exact fractions.
void write_trace(std::ostream& os, std::span<const TraceEvent> trace);

}  // namespace schedpred
