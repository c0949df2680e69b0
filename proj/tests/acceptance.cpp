// Acceptance harness: one PASS/FAIL line per property, nonzero exit on any
// failure. Tolerances are fixed here and not configurable.

#include "oracles.hpp"

#include "schedpred/analytics.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/experiments.hpp"
#include "schedpred/expectimax.hpp"
#include "schedpred/instance_io.hpp"
#include "schedpred/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace schedpred;

namespace {

constexpr double kStandardErrors = 3.0;       // Monte Carlo agreement band
constexpr double kRequiredCoverage = 0.95;    // share of (point, quantity) pairs inside the band
constexpr double kRatioSearchTolerance = 1e-6;
constexpr double kArrivalBoundSlack = 1e-9;
constexpr double kFloatSlack = 1e-12;         // decomposition and lambda comparisons in double
constexpr double kSmallEps = 0.1;             // "small error rate" for curve orderings
constexpr double kExtremeSmallEps = 0.05;     // w0/w1 = 100 tolerates far less error before preemption wins
constexpr std::size_t kMonteCarloReps = 100000;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const std::vector<Rational> kGridAlphas{Rational(1, 4), Rational(2, 5), Rational(7, 10)};
const std::vector<Rational> kGridRatios{Rational(3), Rational(20), Rational(100)};
const std::vector<Rational> kGridRhos{Rational(1, 10), Rational(1, 2)};
const std::vector<Rational> kGridEps{Rational(0), Rational(1, 10), Rational(3, 10), Rational(1, 2)};

// ---------------------------------------------------------------------------

void exact_optimality() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    std::string first;
    for (const auto& a : kGridAlphas)
        for (const auto& r : kGridRatios)
            for (const auto& rho : kGridRhos)
                for (const auto& e0 : kGridEps)
                    for (const auto& e1 : kGridEps) {
                        const Parameters p(a, r, Rational(1));
                        const PredictionModel m(rho, e0, e1);
                        for (std::size_t n = 1; n <= 5; ++n) {
                            ++checked;
                            const BigRational best = expectimax_optimal(n, m, p);
                            const BigRational rule = beta_rule_expected_cost(n, m, p);
                            if (best != rule) {
                                if (mismatches++ == 0) {
                                    first = " first: n=" + std::to_string(n) + " alpha=" + a.str() + " w0=" + r.str() +
                                            " rho=" + rho.str() + " eps0=" + e0.str() + " eps1=" + e1.str();
                                }
                            }
                        }
                    }
    const double elapsed = seconds_since(start);

    // the tree evaluation of the rule against the engine, realization by realization
    std::size_t oracle_mismatches = 0;
    std::size_t oracle_checked = 0;
    for (const auto& a : kGridAlphas)
        for (const auto& r : kGridRatios)
            for (const auto& rho : kGridRhos)
                for (const auto& e0 : kGridEps)
                    for (const auto& e1 : kGridEps) {
                        const Parameters p(a, r, Rational(1));
                        const PredictionModel m(rho, e0, e1);
                        for (std::size_t n = 1; n <= 4; ++n) {
                            ++oracle_checked;
                            if (beta_rule_expected_cost(n, m, p) !=
                                oracle::enumerated_expected_cost(n, m, p, PolicyKind::BetaThreshold)) {
                                ++oracle_mismatches;
                            }
                        }
                    }

    report("beta rule equals the expectimax optimum (exact)", mismatches == 0 && oracle_mismatches == 0 && elapsed < 60.0,
           std::to_string(checked) + " grid cases, " + std::to_string(mismatches) + " mismatches in " +
               fmt("%.2f", elapsed) + " s; rule value vs engine enumeration: " + std::to_string(oracle_checked) +
               " cases, " + std::to_string(oracle_mismatches) + " mismatches" + first);
}

void monte_carlo_agreement() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.alpha = Rational(2, 5);
    c.rho = Rational(1, 10);
    c.w0 = Rational(20);
    c.w1 = Rational(1);
    c.n = 50;
    c.eps_grid = parse_grid("0:0.05:0.5");
    c.replications = kMonteCarloReps;
    c.seed = 20240601;
    c.policies = {PolicyKind::Nonpreemptive, PolicyKind::Preemptive, PolicyKind::Hybrid};
    const auto rows = run_sweep(c);
    std::size_t inside = 0;
    double worst = 0.0;
    std::string outside;
    for (const SweepRow& r : rows) {
        const double z = std::abs(r.mc_mean_ratio - *r.analytic_ratio) / r.mc_stderr;
        worst = std::max(worst, z);
        if (z <= kStandardErrors) {
            ++inside;
        } else {
            outside += " " + r.policy + "@" + fmt("%.2f", r.eps0.to_double()) + "(z=" + fmt("%.2f", z) + ")";
        }
    }
    const double coverage = static_cast<double>(inside) / static_cast<double>(rows.size());
    report("closed forms agree with simulation", coverage >= kRequiredCoverage,
           std::to_string(inside) + "/" + std::to_string(rows.size()) + " (point, quantity) pairs within " +
               fmt("%.0f", kStandardErrors) + " SE, max |z| " + fmt("%.2f", worst) + ", " +
               std::to_string(c.replications) + " replications, " + fmt("%.1f", seconds_since(start)) + " s" +
               (outside.empty() ? "" : "; outside:" + outside));
}

void perfect_prediction_recovery() {
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Parameters p(kGridAlphas[i % 3], kGridRatios[(i / 3) % 3], Rational(1));
        const PredictionModel m(kGridRhos[(i / 9) % 2], Rational(0), Rational(0));
        const Instance inst = sample_instance(1 + i % 60, m, p, stream_seed(31, i));
        const Rational opt = offline_wspt(inst).total_cost;
        ++checked;
        if (run(inst, PolicyKind::Nonpreemptive).total_cost != opt || run(inst, PolicyKind::Hybrid).total_cost != opt ||
            opt != offline_wspt_cost(inst.size(), inst.urgent_count(), p)) {
            ++bad;
        }
    }
    report("perfect predictions recover the offline optimum", bad == 0,
           std::to_string(checked) + " instances, " + std::to_string(bad) + " with nonpreemptive or hybrid cost != WSPT");
}

void no_false_positive_collapse() {
    std::size_t bad = 0;
    std::string first;
    RunOptions opts;
    opts.record_trace = true;
    const std::vector<Rational> eps0{Rational(1, 20), Rational(1, 10), Rational(3, 10), Rational(1, 2)};
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Parameters p(kGridAlphas[i % 3], kGridRatios[(i / 3) % 3], Rational(1));
        const PredictionModel m(kGridRhos[(i / 9) % 2], eps0[(i / 18) % 4], Rational(0));
        const Instance inst = sample_instance(1 + i % 40, m, p, stream_seed(41, i));
        const auto h = run(inst, PolicyKind::Hybrid, RevelationModel::exact(), opts);
        const auto np = run(inst, PolicyKind::Nonpreemptive, RevelationModel::exact(), opts);
        if (h.trace != np.trace && bad++ == 0) first = "\n" + to_text(inst);
    }
    report("no false positives: hybrid trace equals nonpreemptive trace", bad == 0,
           "1000 instances, " + std::to_string(bad) + " differing traces" + first);
}

/// Large-n excess over OPT from the pair-count limits, per unit n^2/2.
struct LimitOracle {
    double a, w0, w1, e0, e1;
    [[nodiscard]] double opt(double q) const { return (w0 - w1) * q * q + w1; }
    [[nodiscard]] double x(double q) const { return (e0 + e1) * q * (1 - q); }
    [[nodiscard]] double y(double q) const { return (1 - q) * (1 - q); }
    [[nodiscard]] double x0(double q) const { return e1 * (1 - e0) * q * (1 - q); }
    [[nodiscard]] double y0(double q) const { return e1 * e1 * (1 - q) * (1 - q); }
    [[nodiscard]] double nonpreemptive(double q) const { return 1 + (w0 - w1) * x(q) / opt(q); }
    [[nodiscard]] double preemptive(double q) const { return 1 + (a * w0 * x(q) + a * w1 * y(q)) / opt(q); }
    [[nodiscard]] double hybrid(double q) const {
        return 1 + (a * w0 * x0(q) + a * w1 * y0(q) + (w0 - w1) * (x(q) - x0(q))) / opt(q);
    }
};

void competitive_ratio_formulas() {
    std::vector<Rational> alphas;
    for (int k = 1; k <= 9; ++k) alphas.push_back(Rational(k, 10));
    const std::vector<Rational> ratios{Rational(3, 2), Rational(2),  Rational(3),   Rational(5),  Rational(10),
                                       Rational(20),   Rational(50), Rational(100), Rational(1000)};
    std::vector<Rational> eps;
    for (int k = 0; k <= 5; ++k) eps.push_back(Rational(k, 10));
    eps.push_back(Rational(1, 40));

    std::size_t points = 0, flat_checked = 0, flat_bad = 0, decomposition_bad = 0, lambda_bad = 0;
    double worst_np = 0, worst_p = 0, worst_h = 0;
    std::string first;
    for (const auto& a : alphas)
        for (const auto& r : ratios)
            for (const auto& e0 : eps)
                for (const auto& e1 : eps) {
                    const Parameters p(a, r, Rational(1));
                    if (!p.preemption_can_pay()) continue;
                    const PredictionModel m(Rational(1, 10), e0, e1);
                    ++points;
                    const Rational mean_eps = (e0 + e1) / Rational(2);
                    const RatioBound pre = cr_preemptive(m, p);
                    if (mean_eps <= p.w1() / p.w0()) {
                        ++flat_checked;
                        if (pre.value != 1.0 + a.to_double()) ++flat_bad;
                    }
                    const HybridRatio hyb = cr_hybrid(m, p);
                    if (hyb.bound.value > hyb.decomposition_bound + kFloatSlack) ++decomposition_bad;
                    if (hyb.lambda / 2.0 > mean_eps.to_double() + kFloatSlack) ++lambda_bad;

                    const LimitOracle lim{a.to_double(), r.to_double(), 1.0, e0.to_double(), e1.to_double()};
                    const double np_max = oracle::maximize_on_unit_interval([&](double q) { return lim.nonpreemptive(q); });
                    const double p_max = oracle::maximize_on_unit_interval([&](double q) { return lim.preemptive(q); });
                    const double h_max = oracle::maximize_on_unit_interval([&](double q) { return lim.hybrid(q); });
                    const double dnp = std::abs(np_max - cr_nonpreemptive(m, p).value);
                    const double dp = std::abs(p_max - pre.value);
                    const double dh = std::abs(h_max - hyb.bound.value);
                    if ((dnp > kRatioSearchTolerance || dp > kRatioSearchTolerance || dh > kRatioSearchTolerance) &&
                        first.empty()) {
                        first = " first: alpha=" + a.str() + " w0/w1=" + r.str() + " eps0=" + e0.str() +
                                " eps1=" + e1.str() + " gaps " + fmt("%.3g", dnp) + "/" + fmt("%.3g", dp) + "/" +
                                fmt("%.3g", dh);
                    }
                    worst_np = std::max(worst_np, dnp);
                    worst_p = std::max(worst_p, dp);
                    worst_h = std::max(worst_h, dh);
                }
    const bool search_ok =
        worst_np <= kRatioSearchTolerance && worst_p <= kRatioSearchTolerance && worst_h <= kRatioSearchTolerance;
    report("competitive ratio formulas", points >= 1000 && flat_bad == 0 && decomposition_bad == 0 && lambda_bad == 0 &&
                                             search_ok,
           std::to_string(points) + " parameter points; preemptive = 1+alpha on " + std::to_string(flat_checked) +
               " low-error points (" + std::to_string(flat_bad) + " bad); hybrid above decomposition " +
               std::to_string(decomposition_bad) + "; lambda/2 > eps " + std::to_string(lambda_bad) +
               "; max |grid search - closed form| np " + fmt("%.2e", worst_np) + ", p " + fmt("%.2e", worst_p) +
               ", hybrid " + fmt("%.2e", worst_h) + first);
}

void wsrpt_optimality() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t bad = 0;
    std::string first;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Rational w0 = i % 2 ? Rational(3) : Rational(20);
        const auto jobs = random_release_jobs(stream_seed(61, i), 4, w0, Rational(1));
        const Rational greedy = offline_wsrpt(jobs).total_cost;
        const Rational search = enumerate_offline_optimum(jobs, 4);
        const Rational dp = oracle::slot_dp_optimum(jobs);
        if ((greedy != search || greedy != dp) && bad++ == 0) {
            std::ostringstream os;
            for (const auto& j : jobs) os << " (" << j.id << "," << j.weight << "," << j.release << ")";
            first = " first:" + os.str();
        }
    }
    report("WSRPT equals the offline optimum (exact)", bad == 0,
           "1000 instances with n <= 4, " + std::to_string(bad) + " mismatches against enumeration and slot DP, " +
               fmt("%.2f", seconds_since(start)) + " s" + first);
}

void arrival_bound() {
    std::string detail;
    bool ok = true;
    for (const char* alpha_text : {"0.25", "0.41421356", "0.7"}) {
        const Rational alpha = Rational::parse(alpha_text);
        const double bound = alg0_cr_bound(alpha.to_double());
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 10000; ++i) {
            const Rational ratio = i % 2 ? Rational(5) : Rational(20);
            const Parameters p(alpha, ratio, Rational(1));
            const PredictionModel m(kGridRhos[(i / 2) % 2], Rational(0), Rational(0));
            const std::size_t n = 1 + (i / 4) % 12;
            Instance inst = sample_instance(n, m, p, stream_seed(71, i));
            Rng rng = make_stream(stream_seed(72, i), 0);
            std::vector<Rational> releases;
            double t = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (i % 3 == 0) {
                    releases.push_back(Rational(static_cast<std::int64_t>(rng() % 32), 8));
                } else {
                    if (k > 0) t += exponential(rng, 0.9);
                    releases.push_back(Rational::from_double(t, 1024));
                }
            }
            inst = inst.with_release_times(releases);
            const double cost = run(inst, PolicyKind::BetaThreshold).total_cost.to_double();
            const double opt = offline_wsrpt(inst).total_cost.to_double();
            worst = std::max(worst, cost / opt);
        }
        const bool here = worst <= bound + kArrivalBoundSlack;
        ok = ok && here;
        detail += std::string(detail.empty() ? "" : "; ") + "alpha=" + alpha_text + " max " + fmt("%.6f", worst) +
                  " <= " + fmt("%.6f", bound);
    }
    report("types known at release stay within max(1+alpha, 2/(1+alpha)) of WSRPT", ok, detail + " (10000 instances each)");
}

std::vector<SweepRow> analytic_rows(const Rational& alpha, const Rational& w0) {
    ExperimentConfig c;
    c.alpha = alpha;
    c.rho = Rational(1, 10);
    c.w0 = w0;
    c.n = 50;
    c.eps_grid = parse_grid("0:0.05:0.5");
    c.replications = 1;
    c.policies = {PolicyKind::Nonpreemptive, PolicyKind::Preemptive, PolicyKind::Hybrid};
    return run_sweep(c);
}

double column(const std::vector<SweepRow>& rows, std::size_t point, const std::string& policy, bool analytic) {
    for (std::size_t i = point * 4; i < point * 4 + 4; ++i) {
        if (rows[i].policy == policy) return analytic ? *rows[i].analytic_ratio : rows[i].mc_mean_ratio;
    }
    return NAN;
}

void curve_orderings() {
    bool ok = true;
    std::string detail;
    const auto hybrid_leads = [&](const std::vector<SweepRow>& rows, const char* name, bool analytic,
                                  std::size_t stride, double small_eps) {
        std::size_t points = 0, bad = 0;
        for (std::size_t pt = 0; pt * stride < rows.size(); ++pt) {
            const double eps = rows[pt * stride].eps0.to_double();
            if (eps > small_eps + 1e-12) continue;
            ++points;
            double h, np, pr;
            if (analytic) {
                h = column(rows, pt, "hybrid", true);
                np = column(rows, pt, "nonpreemptive", true);
                pr = column(rows, pt, "preemptive", true);
            } else {
                h = rows[pt * stride + 2].mc_mean_ratio;
                np = rows[pt * stride].mc_mean_ratio;
                pr = rows[pt * stride + 1].mc_mean_ratio;
            }
            if (h > np || h > pr) ++bad;
        }
        ok = ok && bad == 0;
        detail += std::string(detail.empty() ? "" : "; ") + name + ": hybrid <= both at " +
                  std::to_string(points - bad) + "/" + std::to_string(points) + " points with eps <= " +
                  fmt("%.2f", small_eps);
    };

    hybrid_leads(analytic_rows(Rational(2, 5), Rational(20)), "alpha=0.4 w0/w1=20", true, 4, kSmallEps);

    const auto extreme = analytic_rows(Rational(2, 5), Rational(100));
    hybrid_leads(extreme, "alpha=0.4 w0/w1=100", true, 4, kExtremeSmallEps);
    // and preemption takes over soon after
    bool crossed = false;
    for (std::size_t pt = 0; pt * 4 < extreme.size(); ++pt) {
        if (extreme[pt * 4].eps0.to_double() <= kSmallEps + 1e-12 &&
            column(extreme, pt, "preemptive", true) < column(extreme, pt, "hybrid", true)) {
            crossed = true;
        }
    }
    ok = ok && crossed;
    detail += std::string(", preemptive ahead by eps ") + fmt("%.2f", kSmallEps) + (crossed ? ": yes" : ": no");

    const auto high_alpha = analytic_rows(Rational(7, 10), Rational(20));
    std::size_t np_better = 0, total = 0;
    for (std::size_t pt = 0; pt * 4 < high_alpha.size(); ++pt) {
        ++total;
        if (column(high_alpha, pt, "nonpreemptive", true) <= column(high_alpha, pt, "preemptive", true)) ++np_better;
    }
    ok = ok && np_better == total;
    detail += "; alpha=0.7: nonpreemptive <= preemptive at " + std::to_string(np_better) + "/" + std::to_string(total) +
              " points";

    ExperimentConfig arrivals;
    arrivals.arrivals = ArrivalMode::Poisson;
    arrivals.n = 50;
    arrivals.eps_grid = parse_grid("0:0.05:0.1");
    arrivals.replications = 10000;
    arrivals.seed = 4;
    arrivals.policies = {PolicyKind::Nonpreemptive, PolicyKind::Preemptive, PolicyKind::Hybrid};
    hybrid_leads(run_arrivals(arrivals), "arrivals (Monte Carlo)", false, 3, kSmallEps);

    report("curve orderings", ok, detail);
}

void modified_rule_degenerates() {
    std::size_t bad = 0;
    std::string first;
    RunOptions opts;
    opts.record_trace = true;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Parameters p(kGridAlphas[i % 3], kGridRatios[(i / 3) % 3], Rational(1));
        const PredictionModel m(kGridRhos[(i / 9) % 2], kGridEps[(i / 18) % 4], kGridEps[(i / 72) % 4]);
        const std::size_t n = 1 + i % 30;
        Instance inst = sample_instance(n, m, p, stream_seed(91, i));
        if (i % 2 == 1) {
            Rng rng = make_stream(stream_seed(92, i), 0);
            std::vector<Rational> releases;
            for (std::size_t k = 0; k < n; ++k) releases.push_back(Rational(static_cast<std::int64_t>(rng() % 64), 8));
            inst = inst.with_release_times(releases);
        }
        if (i % 4 == 3) {
            // probability estimates instead of labels
            Rng rng = make_stream(stream_seed(93, i), 0);
            std::vector<Job> jobs(inst.jobs().begin(), inst.jobs().end());
            for (Job& j : jobs) j.prediction = Rational(static_cast<std::int64_t>(rng() % 21), 20);
            inst = Instance(std::move(jobs), p, std::nullopt);
        }
        const auto a = run(inst, PolicyKind::ModifiedBeta, RevelationModel::exact(), opts);
        const auto b = run(inst, PolicyKind::BetaThreshold, RevelationModel::exact(), opts);
        if (a.trace != b.trace && bad++ == 0) first = "\n" + to_text(inst);
    }
    report("modified threshold with exact revelation equals the beta rule", bad == 0,
           "1000 instances, " + std::to_string(bad) + " differing traces" + first);
}

}  // namespace

int main() {
    exact_optimality();
    monte_carlo_agreement();
    perfect_prediction_recovery();
    no_false_positive_collapse();
    competitive_ratio_formulas();
    wsrpt_optimality();
    arrival_bound();
    curve_orderings();
    modified_rule_degenerates();
    std::cout << (failures == 0 ? "all acceptance checks passed" : std::to_string(failures) + " acceptance check(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
