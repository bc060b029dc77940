#include <doctest.h>

#include <random>

#include "ordcp/scores.hpp"

using namespace ordcp;

namespace {

ProbabilityVector random_pv(std::mt19937_64& rng, int k) {
    std::vector<double> raw(static_cast<std::size_t>(k));
    for (double& x : raw) x = 1e-6 + static_cast<double>(rng() % 10000) / 10000.0;
    return normalize(raw);
}

}  // namespace

TEST_CASE("rank examples") {
    const auto r1 = rank(normalize({0.5, 0.3, 0.2}));
    CHECK(r1.order == std::vector<Label>{1, 2, 3});
    CHECK(r1.cumprob[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r1.cumprob[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r1.cumprob[2] == doctest::Approx(1.0).epsilon(1e-9));

    const auto r2 = rank(normalize({0.2, 0.3, 0.5}));
    CHECK(r2.order == std::vector<Label>{3, 2, 1});
    CHECK(r2.rank[3 - 1] == 1);

    const auto r3 = rank(normalize({1.0, 1.0, 1.0}));
    CHECK(r3.order == std::vector<Label>{1, 2, 3});  // ties order by label
}

TEST_CASE("score examples") {
    const auto p = normalize({0.5, 0.3, 0.2});
    CHECK(score(ScoreKind(ScoreVariant::Naive), p, 2) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(score(ScoreKind(ScoreVariant::APS), p, 2) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(score(ScoreKind(ScoreVariant::RAPS, 0.01), p, 2) ==
          doctest::Approx(0.82).epsilon(1e-12));
    CHECK(score(ScoreKind(ScoreVariant::Naive), normalize({0, 1, 0}), 2) == 0.0);
    CHECK_THROWS_AS(score(ScoreKind(ScoreVariant::APS), p, 4), UnknownLabelError);
    CHECK_THROWS_AS(score(ScoreKind(ScoreVariant::APS), p, 0), UnknownLabelError);
}

TEST_CASE("score_all examples") {
    const auto p = normalize({0.5, 0.3, 0.2});
    const auto naive = score_all(ScoreKind(ScoreVariant::Naive), p);
    CHECK(naive[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(naive[1] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(naive[2] == doctest::Approx(0.8).epsilon(1e-12));
    const auto aps = score_all(ScoreKind(ScoreVariant::APS), p);
    CHECK(aps[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(aps[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(aps[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("score properties on random vectors") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 18);
        const auto p = random_pv(rng, k);
        const double lambda = static_cast<double>(rng() % 100) / 1000.0;
        const ScoreKind naive(ScoreVariant::Naive);
        const ScoreKind aps(ScoreVariant::APS);
        const ScoreKind raps(ScoreVariant::RAPS, lambda);
        const ScoreKind raps0(ScoreVariant::RAPS, 0.0);
        const auto ranking = rank(p);

        const auto sn = score_all(naive, p);
        const auto sa = score_all(aps, p);
        const auto sr = score_all(raps, p);
        const auto sr0 = score_all(raps0, p);

        for (Label y = 1; y <= k; ++y) {
            // vectorization consistency
            CHECK(sn[y - 1] == score(naive, p, y));
            CHECK(sa[y - 1] == score(aps, p, y));
            CHECK(sr[y - 1] == score(raps, p, y));
            // ranges
            CHECK(sn[y - 1] >= 0.0);
            CHECK(sn[y - 1] <= 1.0);
            CHECK(sa[y - 1] > 0.0);
            CHECK(sa[y - 1] <= 1.0 + 1e-9);
            CHECK(sr[y - 1] <= 1.0 + lambda * k + 1e-9);
            // lambda=0 degeneracy is bitwise
            CHECK(sr0[y - 1] == sa[y - 1]);
        }
        // APS non-decreasing in rank; rank-1 label minimal for every kind
        for (int r = 2; r <= k; ++r)
            CHECK(sa[ranking.order[r - 1] - 1] >= sa[ranking.order[r - 2] - 1]);
        const Label top = ranking.order[0];
        for (Label y = 1; y <= k; ++y) {
            CHECK(sn[top - 1] <= sn[y - 1]);
            CHECK(sa[top - 1] <= sa[y - 1]);
            CHECK(sr[top - 1] <= sr[y - 1]);
        }
    }
}

TEST_CASE("kind parsing") {
    CHECK(ScoreKind::parse("naive").variant == ScoreVariant::Naive);
    CHECK(ScoreKind::parse("aps").variant == ScoreVariant::APS);
    CHECK(ScoreKind::parse("raps", 0.05).lambda == 0.05);
    CHECK(ScoreKind::parse("raps").name() == "raps");
    CHECK_THROWS(ScoreKind::parse("margin"));
    CHECK_THROWS(ScoreKind(ScoreVariant::RAPS, -0.1));
}
