#include "ordcp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordcp {

bool CalibratedThreshold::is_infinite() const {
    return std::isinf(tau_hat) && tau_hat > 0.0;
}

CalibratedThreshold calibrate(const LabeledBatch& batch, const ScoreKind& kind, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must lie in (0,1)");
    if (batch.size() == 0) throw EmptyBatchError();
    if (!batch.all_gold()) throw MissingGoldError();

    CalibrationRecord rec;
    rec.kind = kind;
    rec.alpha = alpha;
    rec.n = static_cast<int>(batch.size());
    rec.scores.reserve(batch.size());
    for (const auto& e : batch.examples)
        rec.scores.push_back(score(kind, e.probs, *e.gold));

    const long long n = rec.n;
    const long long idx =
        static_cast<long long>(std::ceil(static_cast<double>(n + 1) * (1.0 - alpha)));

    CalibratedThreshold out;
    out.record = rec;
    if (idx > n) {
        out.tau_hat = std::numeric_limits<double>::infinity();
    } else {
        std::vector<double> sorted = rec.scores;
        std::sort(sorted.begin(), sorted.end());
        out.tau_hat = sorted[static_cast<std::size_t>(idx - 1)];
    }
    return out;
}

PredictionSet predict_set(const CalibratedThreshold& tau, const ProbabilityVector& p) {
    const std::vector<double> scores = score_all(tau.record.kind, p);
    std::vector<Label> members;
    for (Label y = 1; y <= p.k(); ++y)
        if (scores[y - 1] <= tau.tau_hat) members.push_back(y);
    if (members.empty()) members.push_back(argmax_label(p));
    return make_prediction_set(std::move(members), p);
}

double empirical_coverage(const CalibratedThreshold& tau, const LabeledBatch& batch) {
    if (batch.size() == 0) throw EmptyBatchError();
    if (!batch.all_gold()) throw MissingGoldError();
    std::size_t covered = 0;
    for (const auto& e : batch.examples)
        if (predict_set(tau, e.probs).contains(*e.gold)) ++covered;
    return static_cast<double>(covered) / static_cast<double>(batch.size());
}

double average_set_size(const CalibratedThreshold& tau, const LabeledBatch& batch) {
    if (batch.size() == 0) throw EmptyBatchError();
    std::size_t total = 0;
    for (const auto& e : batch.examples) total += predict_set(tau, e.probs).members.size();
    return static_cast<double>(total) / static_cast<double>(batch.size());
}

}  // namespace ordcp
