#include "ordcp/scores.hpp"

#include <algorithm>
#include <numeric>

namespace ordcp {

std::string ScoreKind::name() const {
    switch (variant) {
        case ScoreVariant::Naive: return "naive";
        case ScoreVariant::APS: return "aps";
        case ScoreVariant::RAPS: return "raps";
    }
    return "?";
}

ScoreKind ScoreKind::parse(const std::string& name, double lambda) {
    if (name == "naive") return ScoreKind(ScoreVariant::Naive, lambda);
    if (name == "aps") return ScoreKind(ScoreVariant::APS, lambda);
    if (name == "raps") return ScoreKind(ScoreVariant::RAPS, lambda);
    throw std::invalid_argument("unknown score kind: " + name);
}

SortedRanking rank(const ProbabilityVector& p) {
    const int k = p.k();
    SortedRanking r;
    r.order.resize(k);
    std::iota(r.order.begin(), r.order.end(), 1);
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](Label a, Label b) { return p.at(a) > p.at(b); });
    r.rank.assign(k, 0);
    r.cumprob.resize(k);
    double cum = 0.0;
    for (int i = 0; i < k; ++i) {
        r.rank[r.order[i] - 1] = i + 1;
        cum += p.at(r.order[i]);
        r.cumprob[i] = cum;
    }
    return r;
}

namespace {

double score_from_ranking(const ScoreKind& kind, const ProbabilityVector& p,
                          const SortedRanking& ranking, Label y) {
    switch (kind.variant) {
        case ScoreVariant::Naive:
            return 1.0 - p.at(y);
        case ScoreVariant::APS:
            return ranking.cumprob[ranking.rank[y - 1] - 1];
        case ScoreVariant::RAPS: {
            const int r = ranking.rank[y - 1];
            return ranking.cumprob[r - 1] + kind.lambda * r;
        }
    }
    return 0.0;
}

}  // namespace

double score(const ScoreKind& kind, const ProbabilityVector& p, Label y) {
    if (y < 1 || y > p.k()) throw UnknownLabelError(y);
    if (kind.variant == ScoreVariant::Naive) return 1.0 - p.at(y);
    return score_from_ranking(kind, p, rank(p), y);
}

std::vector<double> score_all(const ScoreKind& kind, const ProbabilityVector& p) {
    const int k = p.k();
    std::vector<double> out(k);
    const SortedRanking ranking = rank(p);
    for (Label y = 1; y <= k; ++y) out[y - 1] = score_from_ranking(kind, p, ranking, y);
    return out;
}

}  // namespace ordcp
