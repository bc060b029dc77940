#pragma once

// Split-conformal calibration and prediction-set construction.

#include <vector>

#include "ordcp/core.hpp"
#include "ordcp/scores.hpp"

namespace ordcp {

struct CalibrationRecord {
    std::vector<double> scores;  // nonconformity at the gold label, one per example
    ScoreKind kind;
    double alpha = 0.10;
    int n = 0;
};

// tau_hat is the ceil((n+1)(1-alpha))-th smallest calibration score, or
// +infinity when that index exceeds n (all labels admitted).
struct CalibratedThreshold {
    double tau_hat = 0.0;
    CalibrationRecord record;

    bool is_infinite() const;
};

CalibratedThreshold calibrate(const LabeledBatch& batch, const ScoreKind& kind, double alpha);

// Members are all labels with score <= tau_hat; an empty raw set falls back
// to the singleton {argmax}.
PredictionSet predict_set(const CalibratedThreshold& tau, const ProbabilityVector& p);

// Fraction of examples whose gold label lies in its prediction set.
double empirical_coverage(const CalibratedThreshold& tau, const LabeledBatch& batch);

double average_set_size(const CalibratedThreshold& tau, const LabeledBatch& batch);

}  // namespace ordcp
