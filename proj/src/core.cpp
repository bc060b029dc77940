#include "ordcp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ordcp {

namespace {
constexpr double kSumTolerance = 1e-6;
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw std::invalid_argument("probability vector needs k >= 2");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (probs_[i] < 0.0) throw NegativeEntryError(i);
        sum += probs_[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum) + ", not 1");
}

ProbabilityVector normalize(const std::vector<double>& raw) {
    std::vector<double> v = raw;
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < -1e-12) throw NegativeEntryError(i);
        if (v[i] < 0.0) v[i] = 0.0;
        sum += v[i];
    }
    if (sum <= 0.0) throw AllZeroError();
    for (double& x : v) x /= sum;
    return ProbabilityVector(std::move(v));
}

Label argmax_label(const ProbabilityVector& p) {
    const auto& v = p.values();
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;  // strict: ties keep the lower label
    return static_cast<Label>(best + 1);
}

LabeledBatch::LabeledBatch(std::vector<Example> ex, LabelSpace space)
    : examples(std::move(ex)), label_space(space) {
    std::set<std::string> ids;
    for (const auto& e : examples) {
        if (e.probs.k() != label_space.k)
            throw MixedKError();
        if (e.gold && !label_space.contains(*e.gold))
            throw UnknownLabelError(*e.gold);
        if (!ids.insert(e.id).second)
            throw std::invalid_argument("duplicate example id: " + e.id);
    }
}

bool LabeledBatch::all_gold() const {
    return std::all_of(examples.begin(), examples.end(),
                       [](const Example& e) { return e.gold.has_value(); });
}

PredictionSet::PredictionSet(std::vector<Label> members_, std::vector<double> weights_)
    : members(std::move(members_)), weights(std::move(weights_)) {
    if (members.empty()) throw EmptySetError();
    if (members.size() != weights.size())
        throw std::invalid_argument("members/weights size mismatch");
    if (!std::is_sorted(members.begin(), members.end()))
        throw std::invalid_argument("members must be sorted");
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("negative renormalized weight");
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("renormalized weights sum to " + std::to_string(sum));
}

bool PredictionSet::contains(Label y) const {
    return std::binary_search(members.begin(), members.end(), y);
}

PredictionSet make_prediction_set(std::vector<Label> members, const ProbabilityVector& p) {
    if (members.empty()) throw EmptySetError();
    std::sort(members.begin(), members.end());
    double mass = 0.0;
    for (Label y : members) mass += p.at(y);
    std::vector<double> w(members.size());
    if (mass > 0.0) {
        for (std::size_t i = 0; i < members.size(); ++i) w[i] = p.at(members[i]) / mass;
    } else {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(members.size()));
    }
    return PredictionSet(std::move(members), std::move(w));
}

}  // namespace ordcp
