#include "schedpred/analytics.hpp"

#include "schedpred/errors.hpp"
#include "schedpred/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace schedpred {
namespace {

double sqrt_of(const Rational& r) { return std::sqrt(r.to_double()); }

Rational mean_error(const PredictionModel& model) { return (model.eps0() + model.eps1()) / Rational(2); }

/// w1 / (w0 - w1), the ratio that shows up in every worst-case q.
Rational weight_ratio(const Parameters& params) { return params.w1() / (params.w0() - params.w1()); }

double worst_q_with_factor(double r, double factor) {
    const double rk = r * factor;
    return std::sqrt(r + rk * rk) - rk;
}

}  // namespace

PairExpectations pair_expectations(std::size_t n, std::size_t n0, const PredictionModel& model) {
    if (n0 > n) throw std::domain_error("n0 = " + std::to_string(n0) + " exceeds n = " + std::to_string(n));
    const BigRational e0 = to_big(model.eps0());
    const BigRational e1 = to_big(model.eps1());
    const BigRational n0b(n0);
    const BigRational n1b(n - n0);
    PairExpectations out;
    out.x = (e0 + e1) * n0b * n1b / 2;
    out.y = n1b * (n1b - 1) / 2;
    out.x0 = e1 * (1 - e0) * n0b * n1b / 2;
    out.y0 = e1 * e1 * (n1b * n1b - n1b) / 2;
    return out;
}

ConditionalExpectation expected_conditional(std::size_t n, std::size_t n0, const PredictionModel& model,
                                            const Parameters& params) {
    const PairExpectations pairs = pair_expectations(n, n0, model);
    const BigRational alpha = to_big(params.alpha());
    const BigRational w0 = to_big(params.w0());
    const BigRational w1 = to_big(params.w1());
    const BigRational nb(n);
    const BigRational n0b(n0);

    ConditionalExpectation out;
    out.n = n;
    out.n0 = n0;
    out.opt = (w0 - w1) * n0b * (n0b + 1) / 2 + w1 * nb * (nb + 1) / 2;
    out.nonpreemptive = out.opt + (w0 - w1) * pairs.x;
    out.preemptive = out.opt + alpha * w0 * pairs.x + alpha * w1 * pairs.y;
    out.hybrid = out.opt + alpha * w0 * pairs.x0 + alpha * w1 * pairs.y0 + (w0 - w1) * (pairs.x - pairs.x0);
    return out;
}

UnconditionalExpectation expected_unconditional(std::size_t n, const PredictionModel& model,
                                                const Parameters& params) {
    if (n == 0) throw std::invalid_argument("expected_unconditional needs n >= 1");
    const BigRational rho = to_big(model.rho());
    const BigRational rest = 1 - rho;

    // Binomial(n, rho) weights built incrementally: w_k = C(n,k) rho^k (1-rho)^(n-k)
    std::vector<BigRational> rest_pow(n + 1);
    rest_pow[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) rest_pow[k] = rest_pow[k - 1] * rest;

    UnconditionalExpectation out;
    out.n = n;
    BigRational binom = 1;
    BigRational rho_pow = 1;
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) {
            binom = binom * BigRational(n - k + 1) / BigRational(k);
            rho_pow *= rho;
        }
        const BigRational w = binom * rho_pow * rest_pow[n - k];
        const ConditionalExpectation c = expected_conditional(n, k, model, params);
        out.opt += w * c.opt;
        out.nonpreemptive += w * c.nonpreemptive;
        out.preemptive += w * c.preemptive;
        out.hybrid += w * c.hybrid;
    }
    out.regime = classify_regime(model, params);
    switch (out.regime) {
        case Regime::Nonpreemptive: out.beta = out.nonpreemptive; break;
        case Regime::Preemptive: out.beta = out.preemptive; break;
        case Regime::Hybrid: out.beta = out.hybrid; break;
    }
    return out;
}

RatioBound cr_nonpreemptive(const PredictionModel& model, const Parameters& params) {
    const Rational eps = mean_error(model);
    const Rational r = weight_ratio(params);
    RatioBound out;
    out.value = 1.0 + eps.to_double() * (sqrt_of(params.w0() / params.w1()) - 1.0);
    out.worst_q = std::sqrt((r + r * r).to_double()) - r.to_double();
    return out;
}

double cr_nonpreemptive_without_assumption(const PredictionModel& model, const Parameters& params) {
    const Rational eps = mean_error(model);
    return 1.0 + eps.to_double() * (sqrt_of(Rational(1) / (Rational(1) - params.alpha())) - 1.0);
}

RatioBound cr_preemptive(const PredictionModel& model, const Parameters& params) {
    const Rational eps = mean_error(model);
    const Rational& w0 = params.w0();
    const Rational& w1 = params.w1();
    const Rational& alpha = params.alpha();
    RatioBound out;
    if (eps <= w1 / w0) {
        out.value = 1.0 + alpha.to_double();
        out.worst_q = 0.0;
        return out;
    }
    const Rational radicand = Rational(1) - Rational(4) * eps + Rational(4) * eps * eps * (w0 / w1);
    const Rational scale = (alpha / Rational(2)) * (w0 / (w0 - w1));
    out.value = 1.0 + scale.to_double() * ((Rational(1) - Rational(2) * eps).to_double() + sqrt_of(radicand));
    const Rational slope = Rational(2) * eps * w0 - Rational(2) * w1;
    const Rational factor = (slope + w0) / slope;
    out.worst_q = worst_q_with_factor(weight_ratio(params).to_double(), factor.to_double());
    return out;
}

Rational hybrid_lambda(const PredictionModel& model, const Parameters& params) {
    const Rational& e0 = model.eps0();
    const Rational& e1 = model.eps1();
    const Rational& a = params.alpha();
    const Rational gap = params.w0() - params.w1();
    const Rational one(1);
    return e0 * (one + e1) + (a * params.w0() / gap) * e1 * (one - e0) - (a * params.w1() / gap) * e1 * e1;
}

HybridRatio cr_hybrid(const PredictionModel& model, const Parameters& params) {
    const double lambda = hybrid_lambda(model, params).to_double();
    const double e1 = model.eps1().to_double();
    const double a = params.alpha().to_double();
    const double w0 = params.w0().to_double();
    const double w1 = params.w1().to_double();
    const double loss = a * e1 * e1;
    const double radicand = (w0 / w1) * lambda * lambda + (w0 / (w0 - w1)) * loss * loss;

    HybridRatio out;
    out.lambda = lambda;
    out.bound.value = 1.0 + 0.5 * (loss - lambda + std::sqrt(radicand));
    out.decomposition_bound =
        1.0 + 0.5 * lambda * (std::sqrt(w0 / w1) - 1.0) + 0.5 * loss * (1.0 + std::sqrt(w0 / (w0 - w1)));

    const double r = w1 / (w0 - w1);
    const double denom = lambda - a * r * e1 * e1;
    if (denom != 0.0) out.bound.worst_q = worst_q_with_factor(r, (lambda + loss) / denom);
    return out;
}

double limiting_excess_nonpreemptive(double q, const PredictionModel& model, const Parameters& params) {
    const double eps = mean_error(model).to_double();
    const double w0 = params.w0().to_double();
    const double w1 = params.w1().to_double();
    return 2.0 * eps * (w0 - w1) * q * (1.0 - q) / ((w0 - w1) * q * q + w1);
}

double limiting_excess_preemptive(double q, const PredictionModel& model, const Parameters& params) {
    const double eps = mean_error(model).to_double();
    const double a = params.alpha().to_double();
    const double w0 = params.w0().to_double();
    const double w1 = params.w1().to_double();
    return a * (2.0 * eps * w0 * q * (1.0 - q) + w1 * (1.0 - q) * (1.0 - q)) / ((w0 - w1) * q * q + w1);
}

double limiting_excess_hybrid(double q, const PredictionModel& model, const Parameters& params) {
    const double e0 = model.eps0().to_double();
    const double e1 = model.eps1().to_double();
    const double a = params.alpha().to_double();
    const double w0 = params.w0().to_double();
    const double w1 = params.w1().to_double();
    const double mixed = a * w0 * e1 * (1.0 - e0) + (w0 - w1) * e0 * (1.0 + e1);
    return (mixed * q * (1.0 - q) + a * w1 * e1 * e1 * (1.0 - q) * (1.0 - q)) / ((w0 - w1) * q * q + w1);
}

CompetitiveRatioReport beta_competitive_ratio(const PredictionModel& model, const Parameters& params) {
    CompetitiveRatioReport out;
    out.nonpreemptive = cr_nonpreemptive(model, params);
    out.preemptive = cr_preemptive(model, params);
    out.hybrid = cr_hybrid(model, params);
    out.regime = classify_regime(model, params);
    switch (out.regime) {
        case Regime::Nonpreemptive: out.beta_rule = out.nonpreemptive.value; break;
        case Regime::Preemptive: out.beta_rule = out.preemptive.value; break;
        case Regime::Hybrid: out.beta_rule = out.hybrid.bound.value; break;
    }
    return out;
}

double alg0_cr_bound(double alpha) { return std::max(1.0 + alpha, 2.0 / (1.0 + alpha)); }

LogLoss log_loss(const Instance& instance, double delta) {
    if (instance.mode() != PredictionMode::Probabilistic) {
        throw InvalidInstance("log-loss needs probability estimates, not binary labels");
    }
    LogLoss out;
    double sum = 0.0;
    for (const Job& job : instance.jobs()) {
        double p = job.probability().to_double();
        if (p < delta || p > 1.0 - delta) {
            p = std::clamp(p, delta, 1.0 - delta);
            ++out.clamped;
        }
        sum += job.true_type == JobType::Urgent ? std::log(p) : std::log(1.0 - p);
    }
    out.eta = -sum / static_cast<double>(instance.size());
    return out;
}

std::string report_json(const PredictionModel& model, const Parameters& params, std::size_t n) {
    const UnconditionalExpectation e = expected_unconditional(n, model, params);
    const CompetitiveRatioReport cr = beta_competitive_ratio(model, params);
    const auto opt = to_double(e.opt);

    nlohmann::ordered_json j;
    j["n"] = n;
    j["alpha"] = params.alpha().str();
    j["w0"] = params.w0().str();
    j["w1"] = params.w1().str();
    j["rho"] = model.rho().str();
    j["eps0"] = model.eps0().str();
    j["eps1"] = model.eps1().str();
    j["beta"] = params.beta().str();
    j["preemption_can_pay"] = params.preemption_can_pay();
    j["regime"] = std::string(to_string(cr.regime));
    j["expected_opt"] = format_sig(opt);
    j["expected_nonpreemptive"] = format_sig(to_double(e.nonpreemptive));
    j["expected_preemptive"] = format_sig(to_double(e.preemptive));
    j["expected_hybrid"] = format_sig(to_double(e.hybrid));
    j["expected_beta"] = format_sig(to_double(e.beta));
    j["ratio_nonpreemptive"] = format_sig(to_double(e.nonpreemptive) / opt);
    j["ratio_preemptive"] = format_sig(to_double(e.preemptive) / opt);
    j["ratio_hybrid"] = format_sig(to_double(e.hybrid) / opt);
    j["ratio_beta"] = format_sig(to_double(e.beta) / opt);
    j["cr_nonpreemptive"] = format_sig(cr.nonpreemptive.value);
    j["cr_preemptive"] = format_sig(cr.preemptive.value);
    j["cr_hybrid"] = format_sig(cr.hybrid.bound.value);
    j["cr_beta"] = format_sig(cr.beta_rule);
    j["cr_hybrid_decomposition_bound"] = format_sig(cr.hybrid.decomposition_bound);
    j["lambda"] = format_sig(cr.hybrid.lambda);
    j["worst_q_nonpreemptive"] = format_sig(cr.nonpreemptive.worst_q.value_or(std::nan("")));
    j["worst_q_preemptive"] = format_sig(cr.preemptive.worst_q.value_or(std::nan("")));
    j["worst_q_hybrid"] = format_sig(cr.hybrid.bound.worst_q.value_or(std::nan("")));
    return j.dump(2);
}

}  // namespace schedpred
