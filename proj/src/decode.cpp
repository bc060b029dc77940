#include "ordcp/decode.hpp"

#include <algorithm>
#include <cmath>

namespace ordcp {

Label decode_mean(const PredictionSet& set) {
    double mean = 0.0;
    for (std::size_t i = 0; i < set.members.size(); ++i)
        mean += static_cast<double>(set.members[i]) * set.weights[i];
    Label y = static_cast<Label>(std::llround(mean));  // half away from zero
    y = std::clamp(y, set.min_member(), set.max_member());
    return y;
}

Label decode_oracle(const PredictionSet& set, Label gold, Label fallback) {
    return set.contains(gold) ? gold : fallback;
}

ProbabilityVector ensemble_average(const std::vector<ProbabilityVector>& ps) {
    if (ps.empty()) throw EmptyListError();
    const int k = ps.front().k();
    std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
    for (const auto& p : ps) {
        if (p.k() != k) throw MixedKError();
        for (int i = 0; i < k; ++i) mean[i] += p.values()[i];
    }
    for (double& x : mean) x /= static_cast<double>(ps.size());
    return normalize(mean);
}

Label ensemble_vote(const std::vector<Label>& points) {
    if (points.empty()) throw EmptyListError();
    std::map<Label, int> counts;
    for (Label y : points) ++counts[y];
    int best = 0;
    for (const auto& [y, c] : counts) best = std::max(best, c);
    std::vector<Label> tied;
    for (const auto& [y, c] : counts)
        if (c == best) tied.push_back(y);
    if (tied.size() == 1) return tied.front();
    double mean = 0.0;
    for (Label y : tied) mean += y;
    mean /= static_cast<double>(tied.size());
    Label pick = tied.front();
    for (Label y : tied) {  // tied is ascending, so ties on distance keep the lower label
        if (std::abs(y - mean) < std::abs(pick - mean)) pick = y;
    }
    return pick;
}

std::map<std::string, Label> document_level(
    const std::vector<std::pair<std::string, Label>>& points) {
    if (points.empty()) throw EmptyListError();
    std::map<std::string, Label> out;
    for (const auto& [doc, y] : points) {
        auto it = out.find(doc);
        if (it == out.end() || y > it->second) out[doc] = y;
    }
    return out;
}

}  // namespace ordcp
