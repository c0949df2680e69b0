#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "schedpred/domain.hpp"
#include "schedpred/errors.hpp"
#include "schedpred/instance_io.hpp"
#include "schedpred/rational.hpp"
#include "schedpred/rng.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace schedpred;

TEST_CASE("rational arithmetic stays in lowest terms") {
    CHECK(Rational(6, -4) == Rational(-3, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
    CHECK((Rational(2, 5) * Rational(5, 2)).str() == "1");
    CHECK(Rational(7).str() == "7");
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(-Rational(1, 3) == Rational(-1, 3));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational parsing") {
    CHECK(Rational::parse("2/5") == Rational(2, 5));
    CHECK(Rational::parse("0.4") == Rational(2, 5));
    CHECK(Rational::parse("20") == Rational(20));
    CHECK(Rational::parse("-0.125") == Rational(-1, 8));
    CHECK(Rational::parse("0.41421356") == Rational(10355339, 25000000));
    CHECK_THROWS(Rational::parse("abc"));
    CHECK_THROWS(Rational::parse("1/"));
    CHECK_THROWS(Rational::parse(""));
}

TEST_CASE("rational overflow is reported, not wrapped") {
    const Rational big(std::int64_t{1} << 62);
    CHECK_THROWS_AS(big * big, RationalOverflow);
    CHECK_THROWS_AS(big + big, RationalOverflow);
    // large intermediates that reduce back into range are fine
    CHECK(Rational(big.num(), 3) * Rational(3, big.num()) == Rational(1));
}

TEST_CASE("from_double rounds to the requested grid") {
    CHECK(Rational::from_double(0.3, 1024) == Rational(307, 1024));
    CHECK(Rational::from_double(2.0, 1024) == Rational(2));
}

TEST_CASE("beta threshold") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    CHECK(p.beta() == Rational(2, 57));
    CHECK(beta(p) == Rational(2, 57));
    CHECK(p.preemption_can_pay());
    // w1 = w0 (1 - alpha) is the boundary: beta = 1
    const Parameters edge(Rational(1, 2), Rational(2), Rational(1));
    CHECK(edge.beta() == Rational(1));
    CHECK_FALSE(edge.preemption_can_pay());
}

TEST_CASE("parameter and model validation") {
    CHECK_THROWS_AS(Parameters(Rational(0), Rational(2), Rational(1)), std::domain_error);
    CHECK_THROWS_AS(Parameters(Rational(1), Rational(2), Rational(1)), std::domain_error);
    CHECK_THROWS_AS(Parameters(Rational(1, 2), Rational(1), Rational(1)), std::domain_error);
    CHECK_THROWS_AS(Parameters(Rational(1, 2), Rational(1), Rational(0)), std::domain_error);
    CHECK_THROWS_AS(PredictionModel(Rational(0), Rational(0), Rational(0)), std::domain_error);
    CHECK_THROWS_AS(PredictionModel(Rational(1, 2), Rational(3, 5), Rational(0)), std::domain_error);
    CHECK_THROWS_AS(PredictionModel(Rational(1, 2), Rational(0), Rational(-1, 10)), std::domain_error);
}

TEST_CASE("posterior worked values") {
    const PredictionModel m(Rational(1, 10), Rational(1, 10), Rational(1, 10));
    CHECK(posterior(m, Label::Urgent) == Rational(1, 2));
    CHECK(posterior(m, Label::Regular) == Rational(1, 82));
    CHECK(m.prob_predicted_urgent() == Rational(9, 50));
}

TEST_CASE("posterior agrees with the joint table and total probability") {
    const std::vector<Rational> rhos{Rational(1, 10), Rational(1, 3), Rational(1, 2), Rational(9, 10)};
    const std::vector<Rational> eps{Rational(0), Rational(1, 20), Rational(1, 5), Rational(1, 2)};
    for (const auto& rho : rhos)
        for (const auto& e0 : eps)
            for (const auto& e1 : eps) {
                const PredictionModel m(rho, e0, e1);
                const Rational p0 = posterior(m, Label::Urgent);
                const Rational p1 = posterior(m, Label::Regular);
                CHECK(p0 == oracle::bayes_posterior(m, Label::Urgent));
                CHECK(p1 == oracle::bayes_posterior(m, Label::Regular));
                const Rational q = m.prob_predicted_urgent();
                CHECK(q * p0 + (Rational(1) - q) * p1 == rho);
                if (e0 + e1 < Rational(1)) CHECK(p1 <= rho);
                if (e0 + e1 < Rational(1)) CHECK(rho <= p0);
            }
}

TEST_CASE("posterior is monotone in the error rates") {
    const Rational rho(1, 5);
    Rational prev0(2);
    Rational prev1(-1);
    for (int k = 0; k <= 10; ++k) {
        const PredictionModel m(rho, Rational(k, 20), Rational(k, 20));
        CHECK(posterior(m, Label::Urgent) < prev0);
        CHECK(posterior(m, Label::Regular) > prev1);
        prev0 = posterior(m, Label::Urgent);
        prev1 = posterior(m, Label::Regular);
    }
}

TEST_CASE("instance validation") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(1, 10), Rational(1, 10), Rational(1, 10));
    CHECK_THROWS_AS(Instance({}, p, m), InvalidInstance);
    CHECK_THROWS_AS(Instance({{1, JobType::Urgent, Label::Urgent, Rational(0)},
                              {1, JobType::Regular, Label::Regular, Rational(0)}},
                             p, m),
                    InvalidInstance);
    CHECK_THROWS_AS(Instance({{1, JobType::Urgent, Label::Urgent, Rational(0)},
                              {2, JobType::Regular, Rational(1, 2), Rational(0)}},
                             p, m),
                    InvalidInstance);
    CHECK_THROWS_AS(Instance({{1, JobType::Urgent, Rational(3, 2), Rational(0)}}, p, std::nullopt), InvalidInstance);
    CHECK_THROWS_AS(Instance({{1, JobType::Urgent, Label::Urgent, Rational(-1)}}, p, m), InvalidInstance);
    CHECK_THROWS_AS(Instance({{1, JobType::Urgent, Label::Urgent, Rational(0)}}, p, std::nullopt), InvalidInstance);
    CHECK_NOTHROW(Instance({{1, JobType::Urgent, Rational(1, 2), Rational(0)}}, p, std::nullopt));
}

TEST_CASE("sampling is a pure function of the seed") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(1, 10), Rational(1, 10), Rational(1, 10));
    const Instance a = sample_instance(40, m, p, 123);
    const Instance b = sample_instance(40, m, p, 123);
    const Instance c = sample_instance(40, m, p, 124);
    CHECK(to_text(a) == to_text(b));
    CHECK(to_text(a) != to_text(c));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.jobs()[i].id == i + 1);
}

TEST_CASE("sampled frequencies follow the model") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(3, 10), Rational(1, 5), Rational(1, 10));
    const Instance inst = sample_instance(200000, m, p, 99);
    double urgent = 0, urgent_flipped = 0, regular_flipped = 0;
    for (const Job& j : inst.jobs()) {
        if (j.true_type == JobType::Urgent) {
            ++urgent;
            if (j.label() == Label::Regular) ++urgent_flipped;
        } else if (j.label() == Label::Urgent) {
            ++regular_flipped;
        }
    }
    const double n = static_cast<double>(inst.size());
    // five standard errors
    CHECK(std::abs(urgent / n - 0.3) < 5 * std::sqrt(0.3 * 0.7 / n));
    CHECK(std::abs(urgent_flipped / urgent - 0.2) < 5 * std::sqrt(0.2 * 0.8 / urgent));
    CHECK(std::abs(regular_flipped / (n - urgent) - 0.1) < 5 * std::sqrt(0.1 * 0.9 / (n - urgent)));
}

TEST_CASE("sort_for_policy is a permutation in prior order") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(1, 10), Rational(1, 10), Rational(1, 10));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Instance inst = sample_instance(25, m, p, seed);
        const auto sorted = sort_for_policy(inst);
        REQUIRE(sorted.size() == inst.size());
        std::set<JobId> ids;
        for (const Job& j : sorted) ids.insert(j.id);
        CHECK(ids.size() == inst.size());
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            const Rational a = inst.prior(sorted[i - 1]);
            const Rational b = inst.prior(sorted[i]);
            CHECK(a >= b);
            if (a == b) CHECK(sorted[i - 1].id < sorted[i].id);
        }
    }
}

TEST_CASE("uninformative labels still sort predicted-urgent first") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(1, 10), Rational(1, 2), Rational(1, 2));
    const Instance inst({{1, JobType::Regular, Label::Regular, Rational(0)},
                         {2, JobType::Urgent, Label::Urgent, Rational(0)},
                         {3, JobType::Regular, Label::Urgent, Rational(0)}},
                        p, m);
    const auto sorted = sort_for_policy(inst);
    CHECK(sorted[0].id == 2);
    CHECK(sorted[1].id == 3);
    CHECK(sorted[2].id == 1);
}

TEST_CASE("stream seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(stream_seed(42, i));
    CHECK(seen.size() == 1000);
    CHECK(stream_seed(42, 7) == stream_seed(42, 7));
    CHECK(stream_seed(42, 7) != stream_seed(43, 7));
}

TEST_CASE("exact bernoulli edge cases and frequency") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(bernoulli(rng, Rational(0)));
        CHECK(bernoulli(rng, Rational(1)));
    }
    int hits = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) hits += bernoulli(rng, Rational(1, 3)) ? 1 : 0;
    CHECK(std::abs(hits / double(trials) - 1.0 / 3.0) < 5 * std::sqrt(2.0 / 9.0 / trials));
}

TEST_CASE("continuous variates have the right first moments") {
    Rng rng(11);
    const int trials = 200000;
    double sum_exp = 0, sum_norm = 0, sum_norm2 = 0, sum_beta = 0, sum_gamma = 0;
    for (int i = 0; i < trials; ++i) {
        sum_exp += exponential(rng, 0.9);
        const double z = standard_normal(rng);
        sum_norm += z;
        sum_norm2 += z * z;
        sum_beta += beta_variate(rng, 4.0, 1.0);
        sum_gamma += gamma(rng, 0.5);
    }
    CHECK(std::abs(sum_exp / trials - 0.9) < 5 * 0.9 / std::sqrt(trials));
    CHECK(std::abs(sum_norm / trials) < 5 / std::sqrt(trials));
    CHECK(std::abs(sum_norm2 / trials - 1.0) < 5 * std::sqrt(2.0 / trials));
    // Beta(4,1): mean 4/5, variance 2/75
    CHECK(std::abs(sum_beta / trials - 0.8) < 5 * std::sqrt(2.0 / 75.0 / trials));
    CHECK(std::abs(sum_gamma / trials - 0.5) < 5 * std::sqrt(0.5 / trials));
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform01(rng);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(uniform_open0(rng) > 0.0);
    }
}

TEST_CASE("instance text round trip") {
    const Parameters p(Rational(2, 5), Rational(20), Rational(1));
    const PredictionModel m(Rational(1, 10), Rational(1, 10), Rational(3, 10));
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Instance inst = sample_instance(1 + seed % 9, m, p, seed);
        std::vector<Rational> releases;
        for (std::size_t i = 0; i < inst.size(); ++i) releases.push_back(Rational(static_cast<std::int64_t>((seed * 7 + i * 3) % 11), 4));
        inst = inst.with_release_times(releases);
        const std::string text = to_text(inst);
        const Instance back = from_text(text);
        CHECK(to_text(back) == text);
        CHECK(back.params() == p);
        CHECK(*back.model() == m);
    }
    const Instance prob({{1, JobType::Urgent, Rational(9, 10), Rational(0)},
                         {2, JobType::Regular, Rational(1, 3), Rational(1, 2)}},
                        p, std::nullopt);
    const Instance back = from_text(to_text(prob));
    CHECK(back.mode() == PredictionMode::Probabilistic);
    CHECK(back.jobs()[1].probability() == Rational(1, 3));
    CHECK(to_text(back) == to_text(prob));
}

TEST_CASE("malformed instance text names the line") {
    const std::string header = "# alpha=2/5 w0=20 w1=1 rho=1/10 eps0=0 eps1=0 mode=binary\n";
    try {
        (void)from_text(header + "1,0,0,0\n2,0,0\n");
        FAIL("expected InvalidInstance");
    } catch (const InvalidInstance& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)from_text(header + "1,2,0,0\n"), InvalidInstance);
    CHECK_THROWS_AS((void)from_text(header + "x,0,0,0\n"), InvalidInstance);
    CHECK_THROWS_AS((void)from_text("1,0,0,0\n"), InvalidInstance);
}
