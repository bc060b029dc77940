#pragma once

// Synthetic exchangeable fixture generator: long-tailed label prior and
// temperature-noised discretized-Gaussian posteriors. Stands in for real
// classifier outputs, which are not redistributable.

#include <cstdint>

#include "ordcp/core.hpp"

namespace ordcp {

struct SynthConfig {
    int n = 1000;
    int k = 19;
    std::uint64_t seed = 0;
    bool with_groups = false;  // attach domain / text-class tags
    bool with_docs = false;    // group consecutive sentences into documents
};

// Rows are i.i.d., so any calibration/test partition is exchangeable.
// Posterior temperature and center shift are drawn from discrete grids, so
// nonconformity scores carry atoms and coverage comes out conservative, the
// way real classifier posteriors behave.
LabeledBatch synth_batch(const SynthConfig& cfg);

}  // namespace ordcp
