#pragma once

// Ordinal evaluation: QWK, exact/adjacent accuracy, mean absolute distance,
// coarse-bin accuracies, coverage diagnostics, stratified splitting and
// alpha sweeps.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ordcp/conformal.hpp"
#include "ordcp/core.hpp"
#include "ordcp/scores.hpp"

namespace ordcp {

// Maps the fine labels 1..k onto contiguous coarse bins.
struct CoarseMap {
    std::string name;
    std::vector<int> bins;  // bins[y-1] is the bin id of fine label y

    int bin_of(Label y) const { return bins.at(static_cast<std::size_t>(y - 1)); }
};

// Equal-width contiguous bins; placeholder until the corpus tables are supplied.
CoarseMap equal_width_coarse_map(const std::string& name, int k, int n_bins);

struct RedistributionReport {
    int newly_wrong = 0;            // baseline exact, decoded wrong
    double newly_wrong_adjacent = 0.0;  // fraction of those within +-1
    int improved = 0;               // absolute error strictly shrank
    std::map<int, double> improvement_histogram;  // shrink distance 1,2,3,4 (4 = 4+) -> fraction
    int worsened = 0;               // nonzero baseline error strictly grew
};

struct BasicMetrics {
    double acc = 0.0;
    double adj_acc = 0.0;
    double dist = 0.0;
};

struct EvaluationReport {
    double qwk = 0.0;
    double acc = 0.0;
    double adj_acc = 0.0;
    double dist = 0.0;
    double acc7 = 0.0, acc5 = 0.0, acc3 = 0.0;
    double coverage = 0.0;
    double avg_set_size = 0.0;
    std::map<std::string, double> per_group_failure;
    RedistributionReport redistribution;
    int n = 0;
};

double qwk(const std::vector<Label>& golds, const std::vector<Label>& preds, int k);

BasicMetrics basic_metrics(const std::vector<Label>& golds, const std::vector<Label>& preds);

double coarse_accuracy(const std::vector<Label>& golds, const std::vector<Label>& preds,
                       const CoarseMap& map);

// Per group-tag failure rate (gold outside the set), plus an "overall" entry.
// groups[i] holds "tag=value" keys for example i.
std::map<std::string, double> failure_rates(const std::vector<PredictionSet>& sets,
                                            const std::vector<Label>& golds,
                                            const std::vector<std::vector<std::string>>& groups);

RedistributionReport redistribution(const std::vector<Label>& golds,
                                    const std::vector<Label>& baseline_preds,
                                    const std::vector<Label>& cp_preds);

// Per gold class, floor(fraction*n + 0.5) examples go to the first split
// (clamped to [1, n-1] when n >= 2; a singleton class goes first).
// Deterministic for a given seed.
std::pair<LabeledBatch, LabeledBatch> stratified_split(const LabeledBatch& batch, double fraction,
                                                       std::uint64_t seed);

struct SweepRow {
    std::string kind;
    double alpha = 0.0;
    double qwk = 0.0;
    double coverage = 0.0;
    double avg_set_size = 0.0;
};

// Calibrate on cal, evaluate the mean-in-set decoder on tune, per (kind, alpha).
std::vector<SweepRow> alpha_sweep(const LabeledBatch& cal, const LabeledBatch& tune,
                                  const std::vector<ScoreKind>& kinds,
                                  const std::vector<double>& alphas);

}  // namespace ordcp
