#pragma once

// Decoders: renormalized in-set mean, oracle upper bound, ensembles, and
// document-level aggregation (hardest sentence wins).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ordcp/core.hpp"

namespace ordcp {

struct DecodedExample {
    std::string id;
    Label point = 0;           // final prediction
    PredictionSet set;
    Label baseline_point = 0;  // plain argmax, kept for redistribution reports
};

// round(sum of y * renormalized weight), half away from zero, clamped to
// [min member, max member].
Label decode_mean(const PredictionSet& set);

// Gold when covered, the supplied fallback otherwise.
Label decode_oracle(const PredictionSet& set, Label gold, Label fallback);

// Elementwise arithmetic mean of aligned distributions.
ProbabilityVector ensemble_average(const std::vector<ProbabilityVector>& ps);

// Most frequent label; among tied labels the one closest to the tied labels'
// mean wins, remaining ties break low.
Label ensemble_vote(const std::vector<Label>& points);

// Per document, the maximum label across its sentences.
std::map<std::string, Label> document_level(const std::vector<std::pair<std::string, Label>>& points);

}  // namespace ordcp
