#include "schedpred/expectimax.hpp"

#include "schedpred/errors.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>

namespace schedpred {
namespace {

/// Memoized cost-to-go. Without a threshold the tree takes the minimum at
/// every decision node.
class Tree {
public:
    Tree(const PredictionModel& model, const Parameters& params, std::optional<Rational> threshold)
        : alpha_(to_big(params.alpha())),
          rest_(1 - alpha_),
          w0_(to_big(params.w0())),
          w1_(to_big(params.w1())),
          p_urgent_label_(posterior(model, Label::Urgent)),
          p_regular_label_(posterior(model, Label::Regular)),
          threshold_(std::move(threshold)) {
        const BigRational p0 = to_big(p_urgent_label_);
        const BigRational p1 = to_big(p_regular_label_);
        expected_w_urgent_label_ = w1_ + (w0_ - w1_) * p0;
        expected_w_regular_label_ = w1_ + (w0_ - w1_) * p1;
    }

    BigRational value(std::size_t u0, std::size_t u1, std::size_t low) {
        if (u0 == 0 && u1 == 0 && low == 0) return 0;
        const auto key = std::make_tuple(u0, u1, low);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        const BigRational unfinished = BigRational(u0) * expected_w_urgent_label_ +
                                       BigRational(u1) * expected_w_regular_label_ + BigRational(low) * w1_;
        std::optional<BigRational> open;
        std::optional<BigRational> finish;
        if (u0 + u1 > 0) open = open_value(u0, u1, low, unfinished);
        if (low > 0) finish = rest_ * unfinished + value(u0, u1, low - 1);

        BigRational result;
        if (!open) {
            result = *finish;
        } else if (!finish) {
            result = *open;
        } else if (threshold_) {
            const Rational& head = u0 > 0 ? p_urgent_label_ : p_regular_label_;
            result = head > *threshold_ ? *open : *finish;
        } else {
            result = *open < *finish ? *open : *finish;
        }
        memo_.emplace(key, result);
        return result;
    }

private:
    BigRational open_value(std::size_t u0, std::size_t u1, std::size_t low, const BigRational& unfinished) {
        const bool urgent_label = u0 > 0;
        const BigRational p = to_big(urgent_label ? p_urgent_label_ : p_regular_label_);
        const BigRational& head_weight = urgent_label ? expected_w_urgent_label_ : expected_w_regular_label_;
        const std::size_t next_u0 = urgent_label ? u0 - 1 : u0;
        const std::size_t next_u1 = urgent_label ? u1 : u1 - 1;
        const BigRational others = unfinished - head_weight;

        BigRational v = alpha_ * unfinished;
        // urgent: the job runs on to completion
        v += p * (rest_ * (others + w0_) + value(next_u0, next_u1, low));
        // regular: it joins the interrupted pool
        v += (1 - p) * value(next_u0, next_u1, low + 1);
        return v;
    }

    BigRational alpha_;
    BigRational rest_;
    BigRational w0_;
    BigRational w1_;
    Rational p_urgent_label_;
    Rational p_regular_label_;
    BigRational expected_w_urgent_label_;
    BigRational expected_w_regular_label_;
    std::optional<Rational> threshold_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, BigRational> memo_;
};

BigRational mix_over_labels(std::size_t n, const PredictionModel& model, Tree& tree) {
    const BigRational q = to_big(model.prob_predicted_urgent());
    BigRational total = 0;
    BigRational binom = 1;
    for (std::size_t m = 0; m <= n; ++m) {
        if (m > 0) binom = binom * BigRational(n - m + 1) / BigRational(m);
        BigRational weight = binom;
        for (std::size_t i = 0; i < m; ++i) weight *= q;
        for (std::size_t i = m; i < n; ++i) weight *= (1 - q);
        if (weight == 0) continue;
        total += weight * tree.value(m, n - m, 0);
    }
    return total;
}

void check_bound(std::size_t n, std::size_t max_jobs) {
    if (n == 0) throw std::invalid_argument("expectimax needs n >= 1");
    if (n > max_jobs) {
        throw ResourceLimit("expectimax limited to n <= " + std::to_string(max_jobs) + ", got n = " + std::to_string(n));
    }
}

}  // namespace

BigRational expectimax_optimal(std::size_t n, const PredictionModel& model, const Parameters& params,
                               std::size_t max_jobs) {
    check_bound(n, max_jobs);
    Tree tree(model, params, std::nullopt);
    return mix_over_labels(n, model, tree);
}

BigRational threshold_rule_expected_cost(std::size_t n, const PredictionModel& model, const Parameters& params,
                                         const Rational& threshold, std::size_t max_jobs) {
    check_bound(n, max_jobs);
    Tree tree(model, params, threshold);
    return mix_over_labels(n, model, tree);
}

BigRational beta_rule_expected_cost(std::size_t n, const PredictionModel& model, const Parameters& params,
                                    std::size_t max_jobs) {
    return threshold_rule_expected_cost(n, model, params, params.beta(), max_jobs);
}

}  // namespace schedpred
