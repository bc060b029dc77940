#pragma once

// Nonconformity scores: naive (inverse probability), APS (cumulative
// probability mass), RAPS (APS plus a linear rank penalty).

#include <string>
#include <vector>

#include "ordcp/core.hpp"

namespace ordcp {

enum class ScoreVariant { Naive, APS, RAPS };

struct ScoreKind {
    ScoreVariant variant = ScoreVariant::APS;
    double lambda = 0.01;  // used by RAPS only

    ScoreKind() = default;
    ScoreKind(ScoreVariant v, double lam = 0.01) : variant(v), lambda(lam) {
        if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    }

    std::string name() const;
    static ScoreKind parse(const std::string& name, double lambda = 0.01);
};

// Labels sorted by descending probability; equal probabilities order by
// ascending label so the ranking is deterministic.
struct SortedRanking {
    std::vector<Label> order;     // order[r-1] is the label at rank r
    std::vector<int> rank;        // rank[y-1] is r(y) in 1..k
    std::vector<double> cumprob;  // cumprob[r-1] = sum of top-r probabilities
};

SortedRanking rank(const ProbabilityVector& p);

double score(const ScoreKind& kind, const ProbabilityVector& p, Label y);

// All k scores from one shared ranking; element y-1 equals score(kind, p, y).
std::vector<double> score_all(const ScoreKind& kind, const ProbabilityVector& p);

}  // namespace ordcp
