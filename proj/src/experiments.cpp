#include "schedpred/experiments.hpp"

#include "schedpred/analytics.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/errors.hpp"
#include "schedpred/expectimax.hpp"
#include "schedpred/format.hpp"
#include "schedpred/instance_io.hpp"
#include "schedpred/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace schedpred {
namespace {

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
    std::size_t t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max<std::size_t>(1, std::min(t, work));
}

/// Runs body(i) for i in [0, count) on `threads` workers. Callers write into
/// per-index slots so the result does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    threads = resolve_threads(threads, count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

struct Moments {
    double mean = 0.0;
    double stderr_ = 0.0;
    double max = 0.0;
};

/// Two-pass mean and standard error over values[i * stride + column].
Moments moments(const std::vector<double>& values, std::size_t stride, std::size_t column, std::size_t count) {
    Moments m;
    double sum = 0.0;
    m.max = -INFINITY;
    for (std::size_t i = 0; i < count; ++i) {
        const double v = values[i * stride + column];
        sum += v;
        m.max = std::max(m.max, v);
    }
    m.mean = sum / static_cast<double>(count);
    if (count > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double d = values[i * stride + column] - m.mean;
            ss += d * d;
        }
        m.stderr_ = std::sqrt(ss / static_cast<double>(count - 1)) / std::sqrt(static_cast<double>(count));
    }
    return m;
}

std::pair<Rational, Rational> grid_errors(const ExperimentConfig& c, const Rational& eps) {
    switch (c.sweep) {
        case SweepVariable::Both: return {eps, eps};
        case SweepVariable::Eps0: return {eps, c.fixed_eps1};
        case SweepVariable::Eps1: return {c.fixed_eps0, eps};
    }
    return {eps, eps};
}

std::optional<double> analytic_for(PolicyKind p, const UnconditionalExpectation& e) {
    const double opt = to_double(e.opt);
    switch (p) {
        case PolicyKind::Nonpreemptive: return to_double(e.nonpreemptive) / opt;
        case PolicyKind::Preemptive: return to_double(e.preemptive) / opt;
        case PolicyKind::Hybrid: return to_double(e.hybrid) / opt;
        case PolicyKind::BetaThreshold: return to_double(e.beta) / opt;
        case PolicyKind::ModifiedBeta: return std::nullopt;
    }
    return std::nullopt;
}

std::string_view sweep_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::Both: return "eps";
        case SweepVariable::Eps0: return "eps0";
        case SweepVariable::Eps1: return "eps1";
    }
    return "eps";
}

std::string grid_string(const std::vector<Rational>& grid) {
    std::string out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i) out += ';';
        out += grid[i].str();
    }
    return out;
}

std::string policies_string(const std::vector<PolicyKind>& policies) {
    std::string out;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        if (i) out += ';';
        out += to_string(policies[i]);
    }
    return out;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_sig(*v) : std::string(); }

std::vector<std::pair<std::string, std::string>> config_pairs(const ExperimentConfig& c, const std::string& command) {
    std::vector<std::pair<std::string, std::string>> kv{
        {"command", command},
        {"alpha", c.alpha.str()},
        {"rho", c.rho.str()},
        {"w0", c.w0.str()},
        {"w1", c.w1.str()},
        {"n", std::to_string(c.n)},
        {"sweep", std::string(sweep_name(c.sweep))},
        {"eps_grid", grid_string(c.eps_grid)},
        {"fixed_eps0", c.fixed_eps0.str()},
        {"fixed_eps1", c.fixed_eps1.str()},
        {"replications", std::to_string(c.replications)},
        {"seed", std::to_string(c.seed)},
        {"arrivals", c.arrivals == ArrivalMode::Batch ? "batch" : "poisson"},
        {"policies", policies_string(c.policies)},
        {"revelation", c.revelation.mode == RevelationModel::Mode::Exact
                           ? std::string("exact")
                           : "beta(" + format_sig(c.revelation.a) + "," + format_sig(c.revelation.b) + ")"},
    };
    if (c.arrivals == ArrivalMode::Poisson) {
        kv.emplace_back("interarrival", format_sig(c.mean_interarrival));
        kv.emplace_back("release_grid", "1/" + std::to_string(c.release_grid));
        kv.emplace_back("normalization", "per-replication offline WSRPT cost");
    } else {
        kv.emplace_back("normalization", "analytic unconditional E(OPT)");
    }
    if (c.figure == SweepFigure::CompetitiveRatio) {
        // limiting ratios: nothing is simulated and n drops out
        std::erase_if(kv, [](const auto& p) {
            return p.first == "n" || p.first == "replications" || p.first == "seed" || p.first == "policies" ||
                   p.first == "revelation" || p.first == "normalization";
        });
        kv.emplace_back("figure", "cr");
    }
    return kv;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (eps_grid.empty()) throw std::invalid_argument("error-rate grid is empty");
    for (const Rational& e : eps_grid) {
        if (e < Rational(0) || e > Rational(1, 2)) {
            throw std::invalid_argument("grid point " + e.str() + " outside [0, 1/2]");
        }
    }
    if (replications == 0) throw std::invalid_argument("replications must be at least 1");
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (arrivals == ArrivalMode::Poisson && !(mean_interarrival > 0.0)) {
        throw std::invalid_argument("mean interarrival time must be positive");
    }
    if (policies.empty()) throw std::invalid_argument("no policies selected");
    (void)params();
    (void)PredictionModel(rho, fixed_eps0, fixed_eps1);
}

PredictionModel ExperimentConfig::model_at(const Rational& eps) const {
    auto [e0, e1] = grid_errors(*this, eps);
    return PredictionModel(rho, e0, e1);
}

std::vector<Rational> parse_grid(const std::string& text) {
    std::vector<Rational> out;
    if (text.find(':') != std::string::npos) {
        std::vector<Rational> parts;
        std::istringstream in(text);
        std::string piece;
        while (std::getline(in, piece, ':')) parts.push_back(Rational::parse(piece));
        if (parts.size() != 3) throw std::invalid_argument("range grid must be start:step:stop");
        if (!(parts[1] > Rational(0))) throw std::invalid_argument("grid step must be positive");
        for (Rational x = parts[0]; x <= parts[2]; x += parts[1]) out.push_back(x);
        return out;
    }
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        if (!piece.empty()) out.push_back(Rational::parse(piece));
    }
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
    config.validate();
    const Parameters params = config.params();
    const std::size_t reps = config.replications;
    const std::size_t stride = config.policies.size() + 1;  // column 0 holds OPT

    std::vector<SweepRow> rows;
    for (const Rational& eps : config.eps_grid) {
        const PredictionModel model = config.model_at(eps);
        const UnconditionalExpectation e = expected_unconditional(config.n, model, params);
        const double expected_opt = to_double(e.opt);

        std::vector<double> costs(reps * stride);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            const Instance inst = sample_instance(config.n, model, params, stream_seed(config.seed, r));
            costs[r * stride] = offline_wspt(inst).total_cost.to_double();
            for (std::size_t p = 0; p < config.policies.size(); ++p) {
                RunOptions opts;
                opts.revelation_seed = stream_seed(stream_seed(config.seed, r), p + 1);
                costs[r * stride + p + 1] = run(inst, config.policies[p], config.revelation, opts).total_cost.to_double();
            }
        });

        for (std::size_t col = 0; col < stride; ++col) {
            const Moments m = moments(costs, stride, col, reps);
            SweepRow row;
            row.eps0 = model.eps0();
            row.eps1 = model.eps1();
            row.policy = col == 0 ? "opt" : std::string(to_string(config.policies[col - 1]));
            row.analytic_ratio = col == 0 ? std::optional<double>(1.0) : analytic_for(config.policies[col - 1], e);
            row.mc_mean_ratio = m.mean / expected_opt;
            row.mc_stderr = m.stderr_ / expected_opt;
            row.replications = reps;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<CompetitiveRow> run_competitive_sweep(const ExperimentConfig& config) {
    config.validate();
    const Parameters params = config.params();
    std::vector<CompetitiveRow> rows;
    for (const Rational& eps : config.eps_grid) {
        const PredictionModel model = config.model_at(eps);
        const CompetitiveRatioReport cr = beta_competitive_ratio(model, params);
        rows.push_back({model.eps0(), model.eps1(), cr.nonpreemptive.value, cr.preemptive.value,
                        cr.hybrid.bound.value, cr.beta_rule, cr.regime});
    }
    return rows;
}

Instance sample_arrival_instance(const ExperimentConfig& config, const PredictionModel& model,
                                 std::uint64_t replication) {
    const std::uint64_t base = stream_seed(config.seed, replication);
    const Instance batch = sample_instance(config.n, model, config.params(), base);
    Rng rng = make_stream(base, 0);
    std::vector<Rational> releases;
    releases.reserve(config.n);
    double t = 0.0;
    for (std::size_t i = 0; i < config.n; ++i) {
        if (i > 0) t += exponential(rng, config.mean_interarrival);
        releases.push_back(Rational::from_double(t, config.release_grid));
    }
    return batch.with_release_times(releases);
}

std::vector<SweepRow> run_arrivals(const ExperimentConfig& config) {
    config.validate();
    const std::size_t reps = config.replications;
    const std::size_t stride = config.policies.size();

    std::vector<SweepRow> rows;
    for (const Rational& eps : config.eps_grid) {
        const PredictionModel model = config.model_at(eps);
        std::vector<double> ratios(reps * stride);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            const Instance inst = sample_arrival_instance(config, model, r);
            const Rational opt = offline_wsrpt(inst).total_cost;
            for (std::size_t p = 0; p < stride; ++p) {
                RunOptions opts;
                opts.revelation_seed = stream_seed(stream_seed(config.seed, r), p + 1);
                const Rational cost = run(inst, config.policies[p], config.revelation, opts).total_cost;
                ratios[r * stride + p] = (cost / opt).to_double();
            }
        });
        for (std::size_t p = 0; p < stride; ++p) {
            const Moments m = moments(ratios, stride, p, reps);
            SweepRow row;
            row.eps0 = model.eps0();
            row.eps1 = model.eps1();
            row.policy = std::string(to_string(config.policies[p]));
            row.mc_mean_ratio = m.mean;
            row.mc_stderr = m.stderr_;
            row.replications = reps;
            row.mc_max_ratio = m.max;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_config_header(std::ostream& os, const ExperimentConfig& config, const std::string& command) {
    for (const auto& [k, v] : config_pairs(config, command)) os << "# " << k << '=' << v << '\n';
}

void write_rows(std::ostream& os, const ExperimentConfig& config, const std::string& command,
                const std::vector<SweepRow>& rows) {
    const bool with_max = config.arrivals == ArrivalMode::Poisson;
    if (config.format == OutputFormat::Json) {
        nlohmann::ordered_json doc;
        for (const auto& [k, v] : config_pairs(config, command)) doc["config"][k] = v;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const SweepRow& r : rows) {
            nlohmann::ordered_json j;
            j["eps0"] = r.eps0.str();
            j["eps1"] = r.eps1.str();
            j["policy"] = r.policy;
            j["analytic_ratio"] = optional_cell(r.analytic_ratio);
            j["mc_mean_ratio"] = format_sig(r.mc_mean_ratio);
            j["mc_stderr"] = format_sig(r.mc_stderr);
            j["replications"] = r.replications;
            if (with_max) j["mc_max_ratio"] = optional_cell(r.mc_max_ratio);
            doc["rows"].push_back(std::move(j));
        }
        os << doc.dump(2) << '\n';
        return;
    }
    write_config_header(os, config, command);
    os << "eps0,eps1,policy,analytic_ratio,mc_mean_ratio,mc_stderr,replications" << (with_max ? ",mc_max_ratio" : "")
       << '\n';
    for (const SweepRow& r : rows) {
        os << r.eps0.to_double() << ',' << r.eps1.to_double() << ',' << r.policy << ',' << optional_cell(r.analytic_ratio)
           << ',' << format_sig(r.mc_mean_ratio) << ',' << format_sig(r.mc_stderr) << ',' << r.replications;
        if (with_max) os << ',' << optional_cell(r.mc_max_ratio);
        os << '\n';
    }
}

void write_rows(std::ostream& os, const ExperimentConfig& config, const std::string& command,
                const std::vector<CompetitiveRow>& rows) {
    if (config.format == OutputFormat::Json) {
        nlohmann::ordered_json doc;
        for (const auto& [k, v] : config_pairs(config, command)) doc["config"][k] = v;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const CompetitiveRow& r : rows) {
            nlohmann::ordered_json j;
            j["eps0"] = r.eps0.str();
            j["eps1"] = r.eps1.str();
            j["cr_nonpreemptive"] = format_sig(r.cr_nonpreemptive);
            j["cr_preemptive"] = format_sig(r.cr_preemptive);
            j["cr_hybrid"] = format_sig(r.cr_hybrid);
            j["cr_beta"] = format_sig(r.cr_beta);
            j["regime"] = std::string(to_string(r.regime));
            doc["rows"].push_back(std::move(j));
        }
        os << doc.dump(2) << '\n';
        return;
    }
    write_config_header(os, config, command);
    os << "eps0,eps1,cr_nonpreemptive,cr_preemptive,cr_hybrid,cr_beta,regime\n";
    for (const CompetitiveRow& r : rows) {
        os << r.eps0.to_double() << ',' << r.eps1.to_double() << ',' << format_sig(r.cr_nonpreemptive) << ','
           << format_sig(r.cr_preemptive) << ',' << format_sig(r.cr_hybrid) << ',' << format_sig(r.cr_beta) << ','
           << to_string(r.regime) << '\n';
    }
}

std::vector<WeightedJob> random_release_jobs(std::uint64_t seed, std::size_t max_jobs, const Rational& w0,
                                             const Rational& w1) {
    Rng rng(seed);
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % max_jobs);
    std::vector<WeightedJob> jobs(n);
    for (std::size_t i = 0; i < n; ++i) {
        jobs[i].id = static_cast<JobId>(i + 1);
        jobs[i].weight = (rng() & 1U) ? w0 : w1;
        jobs[i].release = Rational(static_cast<std::int64_t>(rng() % 32), 8);
    }
    return jobs;
}

namespace {

std::string describe_point(std::size_t n, const PredictionModel& m, const Parameters& p) {
    std::ostringstream os;
    os << "n=" << n << " alpha=" << p.alpha() << " w0=" << p.w0() << " w1=" << p.w1() << " rho=" << m.rho()
       << " eps0=" << m.eps0() << " eps1=" << m.eps1();
    return os.str();
}

std::string describe_jobs(std::span<const WeightedJob> jobs) {
    std::ostringstream os;
    os << "# id,weight,release_time\n";
    for (const WeightedJob& j : jobs) os << j.id << ',' << j.weight << ',' << j.release << '\n';
    return os.str();
}

const std::vector<Rational>& grid_alphas() {
    static const std::vector<Rational> v{Rational(1, 4), Rational(2, 5), Rational(7, 10)};
    return v;
}
const std::vector<Rational>& grid_ratios() {
    static const std::vector<Rational> v{Rational(3), Rational(20), Rational(100)};
    return v;
}
const std::vector<Rational>& grid_rhos() {
    static const std::vector<Rational> v{Rational(1, 10), Rational(1, 2)};
    return v;
}
const std::vector<Rational>& grid_eps() {
    static const std::vector<Rational> v{Rational(0), Rational(1, 10), Rational(3, 10), Rational(1, 2)};
    return v;
}

template <class Visit>
void for_each_grid_point(Visit&& visit) {
    for (const Rational& a : grid_alphas())
        for (const Rational& ratio : grid_ratios())
            for (const Rational& rho : grid_rhos())
                for (const Rational& e0 : grid_eps())
                    for (const Rational& e1 : grid_eps())
                        visit(PredictionModel(rho, e0, e1), Parameters(a, ratio, Rational(1)));
}

void note_failure(CheckResult& r, const std::string& what) {
    if (r.failures++ == 0) r.first_failure = what;
}

}  // namespace

CheckResult verify_beta_optimality(const VerifyConfig& config) {
    if (config.max_n > config.expectimax_bound) {
        throw ResourceLimit("verify: n bound " + std::to_string(config.max_n) + " exceeds the expectimax limit " +
                            std::to_string(config.expectimax_bound));
    }
    CheckResult result{"beta rule equals expectimax optimum", 0, 0, {}};
    for_each_grid_point([&](const PredictionModel& model, const Parameters& params) {
        for (std::size_t n = 1; n <= config.max_n; ++n) {
            ++result.checked;
            const BigRational best = expectimax_optimal(n, model, params, config.expectimax_bound);
            const BigRational rule = threshold_rule_expected_cost(
                n, model, params, params.beta() + config.beta_perturbation, config.expectimax_bound);
            if (best != rule) {
                note_failure(result, describe_point(n, model, params) + " optimum=" + to_fraction_string(best) +
                                         " beta_rule=" + to_fraction_string(rule));
            }
        }
    });
    return result;
}

CheckResult verify_wsrpt(const VerifyConfig& config) {
    CheckResult result{"WSRPT equals exhaustive offline optimum", 0, 0, {}};
    for (std::size_t i = 0; i < config.wsrpt_instances; ++i) {
        const Rational w0 = (i % 2 == 0) ? Rational(20) : Rational(3);
        const auto jobs = random_release_jobs(stream_seed(config.seed, i), config.wsrpt_max_jobs, w0, Rational(1));
        ++result.checked;
        const Rational greedy = offline_wsrpt(jobs).total_cost;
        const Rational exhaustive = enumerate_offline_optimum(jobs, config.wsrpt_max_jobs);
        if (greedy != exhaustive) {
            note_failure(result, describe_jobs(jobs) + "wsrpt=" + greedy.str() + " exhaustive=" + exhaustive.str());
        }
    }
    return result;
}

CheckResult verify_regimes(const VerifyConfig& config) {
    CheckResult result{"beta rule schedule matches its regime's fixed policy", 0, 0, {}};
    std::uint64_t counter = 0;
    for_each_grid_point([&](const PredictionModel& model, const Parameters& params) {
        // at P(0 | pred 1) == beta the rule is indifferent and the closed-form
        // classification names a different, equally good schedule
        if (posterior(model, Label::Regular) == params.beta()) return;
        const Regime regime = classify_regime(model, params);
        const PolicyKind twin = regime == Regime::Nonpreemptive ? PolicyKind::Nonpreemptive
                                : regime == Regime::Preemptive  ? PolicyKind::Preemptive
                                                                : PolicyKind::Hybrid;
        const std::size_t per_point = std::max<std::size_t>(1, config.regime_instances / 16);
        for (std::size_t k = 0; k < per_point; ++k) {
            const std::uint64_t s = stream_seed(config.seed ^ 0x5eedULL, counter++);
            const std::size_t n = 1 + static_cast<std::size_t>(s % 12);
            const Instance inst = sample_instance(n, model, params, s);
            RunOptions opts;
            opts.record_trace = true;
            const RunOutcome a = run(inst, PolicyKind::BetaThreshold, RevelationModel::exact(), opts);
            const RunOutcome b = run(inst, twin, RevelationModel::exact(), opts);
            ++result.checked;
            if (a.trace != b.trace) {
                note_failure(result, "regime=" + std::string(to_string(regime)) + "\n" + to_text(inst));
            }
        }
    });
    return result;
}

std::vector<CheckResult> run_verify(const VerifyConfig& config) {
    return {verify_beta_optimality(config), verify_wsrpt(config), verify_regimes(config)};
}

}  // namespace schedpred
