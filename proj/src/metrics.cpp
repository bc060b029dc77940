#include "ordcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ordcp/decode.hpp"

namespace ordcp {

CoarseMap equal_width_coarse_map(const std::string& name, int k, int n_bins) {
    if (n_bins < 1 || n_bins > k) throw std::invalid_argument("bad bin count");
    CoarseMap m;
    m.name = name;
    m.bins.resize(static_cast<std::size_t>(k));
    // First (k % n_bins) bins get one extra label so ranges stay contiguous.
    const int base = k / n_bins, extra = k % n_bins;
    int y = 0;
    for (int b = 1; b <= n_bins; ++b) {
        const int width = base + (b <= extra ? 1 : 0);
        for (int i = 0; i < width; ++i) m.bins[static_cast<std::size_t>(y++)] = b;
    }
    return m;
}

namespace {

void check_lists(const std::vector<Label>& golds, const std::vector<Label>& preds) {
    if (golds.size() != preds.size()) throw LengthMismatchError();
    if (golds.empty()) throw EmptyInputError();
}

}  // namespace

double qwk(const std::vector<Label>& golds, const std::vector<Label>& preds, int k) {
    check_lists(golds, preds);
    const std::size_t n = golds.size();
    std::vector<double> hg(static_cast<std::size_t>(k), 0.0), hp(static_cast<std::size_t>(k), 0.0);
    double sq_disagreement = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Label g = golds[i], p = preds[i];
        if (g < 1 || g > k) throw UnknownLabelError(g);
        if (p < 1 || p > k) throw UnknownLabelError(p);
        hg[static_cast<std::size_t>(g - 1)] += 1.0;
        hp[static_cast<std::size_t>(p - 1)] += 1.0;
        const double d = static_cast<double>(g - p);
        sq_disagreement += d * d;
    }
    // Expected squared disagreement under independent marginals, times n.
    double expected = 0.0;
    for (int i = 0; i < k; ++i) {
        if (hg[static_cast<std::size_t>(i)] == 0.0) continue;
        for (int j = 0; j < k; ++j) {
            const double d = static_cast<double>(i - j);
            expected += hg[static_cast<std::size_t>(i)] * hp[static_cast<std::size_t>(j)] * d * d;
        }
    }
    expected /= static_cast<double>(n);
    if (expected == 0.0) return 1.0;  // constant identical golds and preds
    return 1.0 - sq_disagreement / expected;
}

BasicMetrics basic_metrics(const std::vector<Label>& golds, const std::vector<Label>& preds) {
    check_lists(golds, preds);
    BasicMetrics m;
    const std::size_t n = golds.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int d = std::abs(golds[i] - preds[i]);
        if (d == 0) m.acc += 1.0;
        if (d <= 1) m.adj_acc += 1.0;
        m.dist += d;
    }
    m.acc /= static_cast<double>(n);
    m.adj_acc /= static_cast<double>(n);
    m.dist /= static_cast<double>(n);
    return m;
}

double coarse_accuracy(const std::vector<Label>& golds, const std::vector<Label>& preds,
                       const CoarseMap& map) {
    check_lists(golds, preds);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < golds.size(); ++i)
        if (map.bin_of(golds[i]) == map.bin_of(preds[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(golds.size());
}

std::map<std::string, double> failure_rates(const std::vector<PredictionSet>& sets,
                                            const std::vector<Label>& golds,
                                            const std::vector<std::vector<std::string>>& groups) {
    if (sets.size() != golds.size() || (!groups.empty() && groups.size() != sets.size()))
        throw LengthMismatchError();
    if (sets.empty()) throw EmptyInputError();
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // tag -> {failures, total}
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const bool fail = !sets[i].contains(golds[i]);
        auto& overall = tally["overall"];
        ++overall.second;
        if (fail) ++overall.first;
        if (!groups.empty()) {
            for (const auto& tag : groups[i]) {
                auto& t = tally[tag];
                ++t.second;
                if (fail) ++t.first;
            }
        }
    }
    std::map<std::string, double> out;
    for (const auto& [tag, fc] : tally)
        out[tag] = static_cast<double>(fc.first) / static_cast<double>(fc.second);
    return out;
}

RedistributionReport redistribution(const std::vector<Label>& golds,
                                    const std::vector<Label>& baseline_preds,
                                    const std::vector<Label>& cp_preds) {
    if (golds.size() != baseline_preds.size() || golds.size() != cp_preds.size())
        throw LengthMismatchError();
    RedistributionReport r;
    int newly_wrong_adj = 0;
    std::map<int, int> shrink_counts;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        const int eb = std::abs(baseline_preds[i] - golds[i]);
        const int ec = std::abs(cp_preds[i] - golds[i]);
        if (eb == 0 && ec > 0) {
            ++r.newly_wrong;
            if (ec <= 1) ++newly_wrong_adj;
        }
        if (ec < eb) {
            ++r.improved;
            ++shrink_counts[std::min(eb - ec, 4)];  // 4 bucket means 4+
        }
        if (eb > 0 && ec > eb) ++r.worsened;
    }
    if (r.newly_wrong > 0)
        r.newly_wrong_adjacent = static_cast<double>(newly_wrong_adj) / r.newly_wrong;
    if (r.improved > 0)
        for (const auto& [d, c] : shrink_counts)
            r.improvement_histogram[d] = static_cast<double>(c) / r.improved;
    return r;
}

std::pair<LabeledBatch, LabeledBatch> stratified_split(const LabeledBatch& batch, double fraction,
                                                       std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0) throw std::invalid_argument("fraction must lie in (0,1)");
    if (batch.size() == 0) throw EmptyBatchError();
    if (!batch.all_gold()) throw MissingGoldError();

    // Indices per gold class, in batch order.
    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < batch.size(); ++i)
        by_class[*batch.examples[i].gold].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<bool> first(batch.size(), false);
    for (auto& [label, idx] : by_class) {
        // Hand-rolled Fisher-Yates so membership is identical across platforms.
        for (std::size_t i = idx.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(idx[i - 1], idx[j]);
        }
        const std::size_t n = idx.size();
        std::size_t m;
        if (n == 1) {
            m = 1;
        } else {
            m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
            m = std::clamp<std::size_t>(m, 1, n - 1);
        }
        for (std::size_t i = 0; i < m; ++i) first[idx[i]] = true;
    }

    std::vector<Example> a, b;
    for (std::size_t i = 0; i < batch.size(); ++i)
        (first[i] ? a : b).push_back(batch.examples[i]);
    return {LabeledBatch(std::move(a), batch.label_space),
            LabeledBatch(std::move(b), batch.label_space)};
}

std::vector<SweepRow> alpha_sweep(const LabeledBatch& cal, const LabeledBatch& tune,
                                  const std::vector<ScoreKind>& kinds,
                                  const std::vector<double>& alphas) {
    if (!cal.all_gold() || !tune.all_gold()) throw MissingGoldError();
    std::vector<Label> golds;
    golds.reserve(tune.size());
    for (const auto& e : tune.examples) golds.push_back(*e.gold);

    std::vector<SweepRow> rows;
    for (const auto& kind : kinds) {
        for (double alpha : alphas) {
            const CalibratedThreshold tau = calibrate(cal, kind, alpha);
            std::vector<Label> preds;
            preds.reserve(tune.size());
            std::size_t covered = 0, total_size = 0;
            for (const auto& e : tune.examples) {
                const PredictionSet s = predict_set(tau, e.probs);
                preds.push_back(decode_mean(s));
                if (s.contains(*e.gold)) ++covered;
                total_size += s.members.size();
            }
            SweepRow row;
            row.kind = kind.name();
            row.alpha = alpha;
            row.qwk = qwk(golds, preds, tune.label_space.k);
            row.coverage = static_cast<double>(covered) / static_cast<double>(tune.size());
            row.avg_set_size = static_cast<double>(total_size) / static_cast<double>(tune.size());
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace ordcp
