#pragma once

#include "schedpred/domain.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/policies.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace schedpred {

enum class SweepVariable { Both, Eps0, Eps1 };
enum class ArrivalMode { Batch, Poisson };
enum class OutputFormat { Csv, Json };
enum class SweepFigure { Performance, CompetitiveRatio };

struct ExperimentConfig {
    Rational alpha{2, 5};
    Rational rho{1, 10};
    Rational w0{20};
    Rational w1{1};
    std::size_t n = 50;

    SweepVariable sweep = SweepVariable::Both;
    std::vector<Rational> eps_grid;
    Rational fixed_eps0{0};  ///< Used when only eps1 is swept.
    Rational fixed_eps1{0};  ///< Used when only eps0 is swept.

    std::size_t replications = 100'000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  ///< 0 picks the hardware concurrency.

    ArrivalMode arrivals = ArrivalMode::Batch;
    double mean_interarrival = 0.9;
    std::int64_t release_grid = 1024;  ///< Release dates are rounded to multiples of 1/release_grid.

    RevelationModel revelation = RevelationModel::exact();
    std::vector<PolicyKind> policies{PolicyKind::Nonpreemptive, PolicyKind::Preemptive, PolicyKind::Hybrid,
                                     PolicyKind::BetaThreshold};
    SweepFigure figure = SweepFigure::Performance;
    OutputFormat format = OutputFormat::Csv;

    /// Throws std::invalid_argument for an empty grid, a grid point outside
    /// [0, 1/2], zero replications or a nonpositive interarrival mean.
    void validate() const;

    [[nodiscard]] Parameters params() const { return Parameters(alpha, w0, w1); }
    [[nodiscard]] PredictionModel model_at(const Rational& eps) const;
};

/// "0:0.05:0.5" (inclusive range) or "0,0.1,0.3".
[[nodiscard]] std::vector<Rational> parse_grid(const std::string& text);

/// One output row. `policy` is a policy name or "opt".
struct SweepRow {
    Rational eps0;
    Rational eps1;
    std::string policy;
    std::optional<double> analytic_ratio;
    double mc_mean_ratio = 0.0;
    double mc_stderr = 0.0;
    std::size_t replications = 0;
    std::optional<double> mc_max_ratio;  ///< Arrival sweeps only.
};

struct CompetitiveRow {
    Rational eps0;
    Rational eps1;
    double cr_nonpreemptive = 0.0;
    double cr_preemptive = 0.0;
    double cr_hybrid = 0.0;
    double cr_beta = 0.0;
    Regime regime = Regime::Hybrid;
};

/// Batch sweep: per grid point the analytic E(policy)/E(OPT) and the
/// Monte Carlo mean of cost / E(OPT) over independent instances. Every
/// policy sees the same sampled instance in a replication.
[[nodiscard]] std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

/// Competitive ratio curves over the grid.
[[nodiscard]] std::vector<CompetitiveRow> run_competitive_sweep(const ExperimentConfig& config);

/// Arrival sweep: Poisson releases, each replication normalised by its own
/// offline WSRPT optimum.
[[nodiscard]] std::vector<SweepRow> run_arrivals(const ExperimentConfig& config);

/// Instance with Poisson releases for replication `replication`.
[[nodiscard]] Instance sample_arrival_instance(const ExperimentConfig& config, const PredictionModel& model,
                                               std::uint64_t replication);

void write_config_header(std::ostream& os, const ExperimentConfig& config, const std::string& command);
void write_rows(std::ostream& os, const ExperimentConfig& config, const std::string& command,
                const std::vector<SweepRow>& rows);
void write_rows(std::ostream& os, const ExperimentConfig& config, const std::string& command,
                const std::vector<CompetitiveRow>& rows);

struct VerifyConfig {
    std::size_t max_n = 5;
    std::size_t expectimax_bound = 6;
    std::size_t wsrpt_instances = 1000;
    std::size_t wsrpt_max_jobs = 4;
    std::size_t regime_instances = 200;
    std::uint64_t seed = 7;
    /// Added to beta in the rule being checked against expectimax; nonzero
    /// values exist to confirm the check can fail.
    Rational beta_perturbation{0};
};

struct CheckResult {
    std::string name;
    std::size_t checked = 0;
    std::size_t failures = 0;
    std::string first_failure;  ///< Serialized offending input.

    [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

/// Oracle suites: expectimax optimality of the beta rule over the
/// parameter grid, WSRPT against exhaustive search, and regime consistency
/// of the beta rule with the two fixed policies.
[[nodiscard]] std::vector<CheckResult> run_verify(const VerifyConfig& config);

[[nodiscard]] CheckResult verify_beta_optimality(const VerifyConfig& config);
[[nodiscard]] CheckResult verify_wsrpt(const VerifyConfig& config);
[[nodiscard]] CheckResult verify_regimes(const VerifyConfig& config);

/// Random instance for the offline checks: two weights and release dates on
/// a grid of 1/8 in [0, 4).
[[nodiscard]] std::vector<WeightedJob> random_release_jobs(std::uint64_t seed, std::size_t max_jobs,
                                                           const Rational& w0, const Rational& w1);

}  // namespace schedpred
