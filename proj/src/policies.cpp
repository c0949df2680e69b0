#include "schedpred/policies.hpp"

#include "schedpred/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace schedpred {
namespace {

void require_nonterminal(const PolicyState& state) {
    if (state.terminal()) throw TerminalState("no unopened or interrupted jobs left to act on");
}

Action complete_oldest(const PolicyState& state) { return Action::complete_low(state.interrupted.front().id); }

}  // namespace

PolicyKind policy_from_string(std::string_view name) {
    if (name == "nonpreemptive") return PolicyKind::Nonpreemptive;
    if (name == "preemptive") return PolicyKind::Preemptive;
    if (name == "hybrid") return PolicyKind::Hybrid;
    if (name == "beta") return PolicyKind::BetaThreshold;
    if (name == "modified-beta") return PolicyKind::ModifiedBeta;
    throw std::invalid_argument("unknown policy '" + std::string(name) +
                                "' (expected nonpreemptive, preemptive, hybrid, beta or modified-beta)");
}

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::Nonpreemptive: return "nonpreemptive";
        case PolicyKind::Preemptive: return "preemptive";
        case PolicyKind::Hybrid: return "hybrid";
        case PolicyKind::BetaThreshold: return "beta";
        case PolicyKind::ModifiedBeta: return "modified-beta";
    }
    return "unknown";
}

Action threshold_decide(const PolicyState& state, const Rational& threshold) {
    require_nonterminal(state);
    if (state.unopened.empty()) return complete_oldest(state);
    if (state.interrupted.empty()) return Action::open_next();
    // p_k == threshold completes low
    return state.unopened.front().prior > threshold ? Action::open_next() : complete_oldest(state);
}

Action beta_threshold_decide(const PolicyState& state, const Parameters& params) {
    return threshold_decide(state, params.beta());
}

Action nonpreemptive_decide(const PolicyState& state, const Parameters& /*params*/) {
    require_nonterminal(state);
    if (state.unopened.empty()) return complete_oldest(state);
    return Action::open_next();
}

Action preemptive_decide(const PolicyState& state, const Parameters& /*params*/) {
    require_nonterminal(state);
    if (state.unopened.empty()) return complete_oldest(state);
    return Action::open_next();
}

Action hybrid_decide(const PolicyState& state, const Parameters& /*params*/) {
    require_nonterminal(state);
    if (state.unopened.empty()) return complete_oldest(state);
    if (state.interrupted.empty()) return Action::open_next();
    const QueuedJob& head = state.unopened.front();
    if (!head.label) throw std::invalid_argument("hybrid policy needs binary predicted labels");
    return *head.label == Label::Urgent ? Action::open_next() : complete_oldest(state);
}

std::optional<Rational> modified_threshold(const Parameters& params, const Rational& theta) {
    const Rational one(1);
    if (theta >= one) return std::nullopt;
    const Rational& a = params.alpha();
    return params.beta() + (a / (one - a)) * (params.w0() / (params.w0() - params.w1())) * (theta / (one - theta));
}

Action modified_beta_decide(const PolicyState& state, const Parameters& params) {
    require_nonterminal(state);
    if (state.interrupted.empty()) return Action::open_next();

    // first maximum wins, i.e. the earliest interrupted job among ties
    const auto best = std::max_element(state.interrupted.begin(), state.interrupted.end(),
                                       [](const InterruptedJob& x, const InterruptedJob& y) { return x.theta < y.theta; });
    const Action finish = Action::complete_low(best->id);
    if (state.unopened.empty()) return finish;

    const auto tau = modified_threshold(params, best->theta);
    if (!tau) return finish;
    return state.unopened.front().prior > *tau ? Action::open_next() : finish;
}

Action decide(PolicyKind kind, const PolicyState& state, const Parameters& params) {
    switch (kind) {
        case PolicyKind::Nonpreemptive: return nonpreemptive_decide(state, params);
        case PolicyKind::Preemptive: return preemptive_decide(state, params);
        case PolicyKind::Hybrid: return hybrid_decide(state, params);
        case PolicyKind::BetaThreshold: return beta_threshold_decide(state, params);
        case PolicyKind::ModifiedBeta: return modified_beta_decide(state, params);
    }
    throw std::logic_error("unhandled policy kind");
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Nonpreemptive: return "nonpreemptive";
        case Regime::Preemptive: return "preemptive";
        case Regime::Hybrid: return "hybrid";
    }
    return "unknown";
}

Regime classify_regime(const PredictionModel& model, const Parameters& params) {
    const Rational one(1);
    const Rational b = params.beta();
    const Rational& rho = model.rho();
    const Rational lhs = rho * (one - b) * model.eps0() + b * (one - rho) * model.eps1();
    const Rational bound = std::min(rho * (one - b), b * (one - rho));
    if (lhs < bound) return Regime::Hybrid;
    return rho <= b ? Regime::Nonpreemptive : Regime::Preemptive;
}

Regime classify_regime_by_posteriors(const PredictionModel& model, const Parameters& params) {
    const Rational b = params.beta();
    const Rational high = posterior(model, Label::Urgent);
    const Rational low = posterior(model, Label::Regular);
    if (b >= high) return Regime::Nonpreemptive;
    if (b < low) return Regime::Preemptive;
    return Regime::Hybrid;
}

bool cmu_prefers_opening(const Rational& prior, const Parameters& params) {
    const Rational expected_weight = params.w1() + (params.w0() - params.w1()) * prior;
    return expected_weight / Rational(1) > params.w1() / (Rational(1) - params.alpha());
}

}  // namespace schedpred
