#include "schedpred/analytics.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/errors.hpp"
#include "schedpred/experiments.hpp"
#include "schedpred/format.hpp"
#include "schedpred/instance_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace schedpred;

namespace {

struct CliOptions {
    std::string alpha = "2/5";
    std::string rho = "1/10";
    std::string w0 = "20";
    std::string w1 = "1";
    std::string eps_grid = "0:1/20:1/2";
    std::string sweep = "eps";
    std::string eps0 = "0";
    std::string eps1 = "0";
    std::size_t n = 50;
    std::size_t reps = 0;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::vector<std::string> policies;
    double interarrival = 0.9;
    std::string revelation = "exact";
    double theta_a = 4.0;
    double theta_b = 1.0;
    std::string figure = "performance";
    std::string out;
    std::string format = "csv";
};

struct VerifyOptions {
    VerifyConfig config;
    std::string beta_perturbation = "0";
};

struct RunOneOptions {
    std::string instance;
    std::string policy = "beta";
    bool summary_only = false;
};

RevelationModel revelation_from(const CliOptions& o) {
    if (o.revelation == "exact") return RevelationModel::exact();
    if (o.revelation == "probabilistic") return RevelationModel::probabilistic(o.theta_a, o.theta_b);
    throw std::invalid_argument("unknown revelation model '" + o.revelation + "'");
}

std::vector<PolicyKind> policies_from(const std::vector<std::string>& names, std::vector<PolicyKind> fallback) {
    if (names.empty()) return fallback;
    std::vector<PolicyKind> out;
    for (const auto& n : names) out.push_back(policy_from_string(n));
    return out;
}

ExperimentConfig build_config(const CliOptions& o, std::size_t default_reps, ArrivalMode arrivals) {
    ExperimentConfig c;
    c.alpha = Rational::parse(o.alpha);
    c.rho = Rational::parse(o.rho);
    c.w0 = Rational::parse(o.w0);
    c.w1 = Rational::parse(o.w1);
    c.n = o.n;
    c.eps_grid = parse_grid(o.eps_grid);
    if (o.sweep == "eps") {
        c.sweep = SweepVariable::Both;
    } else if (o.sweep == "eps0") {
        c.sweep = SweepVariable::Eps0;
    } else if (o.sweep == "eps1") {
        c.sweep = SweepVariable::Eps1;
    } else {
        throw std::invalid_argument("unknown sweep variable '" + o.sweep + "'");
    }
    c.fixed_eps0 = Rational::parse(o.eps0);
    c.fixed_eps1 = Rational::parse(o.eps1);
    c.replications = o.reps == 0 ? default_reps : o.reps;
    c.seed = o.seed;
    c.threads = o.threads;
    c.arrivals = arrivals;
    c.mean_interarrival = o.interarrival;
    c.revelation = revelation_from(o);
    c.policies = policies_from(o.policies, c.policies);
    c.figure = o.figure == "cr" ? SweepFigure::CompetitiveRatio : SweepFigure::Performance;
    c.format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    c.validate();
    return c;
}

/// Output goes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void close() {
        if (!file_) return;
        file_->close();
        if (!*file_) throw std::runtime_error("failed writing output file");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_sweep(const CliOptions& o) {
    const ExperimentConfig c = build_config(o, 100'000, ArrivalMode::Batch);
    Sink sink(o.out);
    if (c.figure == SweepFigure::CompetitiveRatio) {
        write_rows(sink.stream(), c, "sweep", run_competitive_sweep(c));
    } else {
        write_rows(sink.stream(), c, "sweep", run_sweep(c));
    }
    sink.close();
    return 0;
}

int cmd_arrivals(const CliOptions& o) {
    const ExperimentConfig c = build_config(o, 10'000, ArrivalMode::Poisson);
    Sink sink(o.out);
    write_rows(sink.stream(), c, "arrivals", run_arrivals(c));
    sink.close();
    return 0;
}

int cmd_verify(VerifyOptions v) {
    v.config.beta_perturbation = Rational::parse(v.beta_perturbation);
    bool ok = true;
    for (const CheckResult& r : run_verify(v.config)) {
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.checked << " checked, " << r.failures
                  << " failed)\n";
        if (!r.passed()) {
            ok = false;
            std::cout << "  first failure:\n" << r.first_failure << '\n';
        }
    }
    return ok ? 0 : 1;
}

int cmd_run_one(const CliOptions& o, const RunOneOptions& r) {
    std::ifstream in(r.instance);
    if (!in) throw std::runtime_error("cannot open instance file '" + r.instance + "'");
    const Instance inst = read_instance(in);

    RunOptions opts;
    opts.record_trace = true;
    opts.revelation_seed = o.seed;
    const RunOutcome outcome = run(inst, policy_from_string(r.policy), revelation_from(o), opts);
    const RunOutcome opt = inst.all_released_at_zero() ? offline_wspt(inst) : offline_wsrpt(inst);

    Sink sink(o.out);
    std::ostream& os = sink.stream();
    os << "# policy=" << r.policy << " jobs=" << inst.size() << " cost=" << outcome.total_cost
       << " offline_opt=" << opt.total_cost << " ratio=" << format_sig((outcome.total_cost / opt.total_cost).to_double())
       << " preemptions=" << outcome.preemption_count << '\n';
    if (!r.summary_only) {
        os << "t,event,job_id,true_type\n";
        write_trace(os, outcome.trace);
    }
    sink.close();
    return 0;
}

int cmd_report(const CliOptions& o) {
    const PredictionModel model(Rational::parse(o.rho), Rational::parse(o.eps0), Rational::parse(o.eps1));
    const Parameters params(Rational::parse(o.alpha), Rational::parse(o.w0), Rational::parse(o.w1));
    Sink sink(o.out);
    sink.stream() << report_json(model, params, o.n) << '\n';
    sink.close();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-machine scheduling with imperfect urgency predictions"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions o;
    app.add_option("--alpha", o.alpha, "Revelation fraction alpha")->capture_default_str();
    app.add_option("--rho", o.rho, "Urgent job probability")->capture_default_str();
    app.add_option("--w0", o.w0, "Urgent job weight")->capture_default_str();
    app.add_option("--w1", o.w1, "Regular job weight")->capture_default_str();
    app.add_option("--eps-grid", o.eps_grid, "start:step:stop or comma list")->capture_default_str();
    app.add_option("--sweep", o.sweep, "Swept error rate")
        ->check(CLI::IsMember({"eps", "eps0", "eps1"}))
        ->capture_default_str();
    app.add_option("--eps0", o.eps0, "False negative rate when not swept")->capture_default_str();
    app.add_option("--eps1", o.eps1, "False positive rate when not swept")->capture_default_str();
    app.add_option("--n", o.n, "Jobs per instance")->capture_default_str();
    app.add_option("--reps", o.reps, "Replications (default 100000 for sweep, 10000 for arrivals)");
    app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--policy", o.policies, "Policies: nonpreemptive, preemptive, hybrid, beta, modified-beta")
        ->delimiter(',');
    app.add_option("--interarrival", o.interarrival, "Mean interarrival time")->capture_default_str();
    app.add_option("--revelation", o.revelation, "What an alpha-point reveals")
        ->check(CLI::IsMember({"exact", "probabilistic"}))
        ->capture_default_str();
    app.add_option("--theta-a", o.theta_a, "Beta shape a for probabilistic revelation")->capture_default_str();
    app.add_option("--theta-b", o.theta_b, "Beta shape b for probabilistic revelation")->capture_default_str();
    app.add_option("--figure", o.figure, "Sweep output")
        ->check(CLI::IsMember({"performance", "cr"}))
        ->capture_default_str();
    app.add_option("--out", o.out, "Output path (stdout when omitted)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Batch sweep over the error-rate grid");
    auto* arrivals = app.add_subcommand("arrivals", "Poisson arrivals, normalized by offline WSRPT");

    VerifyOptions v;
    auto* verify = app.add_subcommand("verify", "Run the oracle suites");
    verify->add_option("--max-n", v.config.max_n, "Largest n for the expectimax check")->capture_default_str();
    verify->add_option("--expectimax-bound", v.config.expectimax_bound, "Size limit of the expectimax search")
        ->capture_default_str();
    verify->add_option("--instances", v.config.wsrpt_instances, "Random instances for the WSRPT check")
        ->capture_default_str();
    verify->add_option("--regime-instances", v.config.regime_instances, "Random instances for the regime check")
        ->capture_default_str();
    verify->add_option("--verify-seed", v.config.seed, "Seed for the random checks")->capture_default_str();
    verify->add_option("--beta-perturbation", v.beta_perturbation, "Offset added to beta in the rule under test")
        ->capture_default_str();

    RunOneOptions r;
    auto* run_one = app.add_subcommand("run-one", "Schedule one serialized instance and print its trace");
    run_one->add_option("instance", r.instance, "Instance file")->required();
    run_one->add_flag("--summary", r.summary_only, "Print the summary line only");

    auto* report = app.add_subcommand("report", "Analytic expectations and competitive ratios as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!o.policies.empty() && *run_one) r.policy = o.policies.front();
        if (*sweep) return cmd_sweep(o);
        if (*arrivals) return cmd_arrivals(o);
        if (*verify) return cmd_verify(v);
        if (*run_one) return cmd_run_one(o, r);
        if (*report) return cmd_report(o);
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
