#pragma once

// Core domain types for ordinal conformal prediction: label spaces,
// probability vectors, labeled batches and prediction sets.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordcp {

// Labels are 1-based integers 1..k.
using Label = int;

struct AllZeroError : std::runtime_error {
    AllZeroError() : std::runtime_error("probability row is all zero") {}
};
struct NegativeEntryError : std::runtime_error {
    explicit NegativeEntryError(std::size_t i)
        : std::runtime_error("negative probability entry at index " + std::to_string(i)) {}
};
struct UnknownLabelError : std::runtime_error {
    explicit UnknownLabelError(Label y)
        : std::runtime_error("label " + std::to_string(y) + " outside 1..k") {}
};
struct MissingGoldError : std::runtime_error {
    MissingGoldError() : std::runtime_error("example lacks a gold label") {}
};
struct EmptyBatchError : std::runtime_error {
    EmptyBatchError() : std::runtime_error("batch is empty") {}
};
struct EmptySetError : std::runtime_error {
    EmptySetError() : std::runtime_error("prediction set is empty") {}
};
struct EmptyListError : std::runtime_error {
    EmptyListError() : std::runtime_error("empty input list") {}
};
struct MixedKError : std::runtime_error {
    MixedKError() : std::runtime_error("probability vectors have differing k") {}
};
struct LengthMismatchError : std::runtime_error {
    LengthMismatchError() : std::runtime_error("input lists differ in length") {}
};
struct EmptyInputError : std::runtime_error {
    EmptyInputError() : std::runtime_error("empty input") {}
};

struct LabelSpace {
    int k = 19;

    explicit LabelSpace(int k_ = 19) : k(k_) {
        if (k < 2) throw std::invalid_argument("label space needs k >= 2");
    }
    bool contains(Label y) const { return y >= 1 && y <= k; }
};

// A distribution over k ordered labels. probs[i] is p(label i+1 | x).
class ProbabilityVector {
  public:
    explicit ProbabilityVector(std::vector<double> probs);

    int k() const { return static_cast<int>(probs_.size()); }
    double at(Label y) const { return probs_.at(static_cast<std::size_t>(y - 1)); }
    const std::vector<double>& values() const { return probs_; }

  private:
    std::vector<double> probs_;
};

// Clamp tiny negative noise, reject real negatives, divide by the sum.
ProbabilityVector normalize(const std::vector<double>& raw);

// Smallest label attaining the maximum probability.
Label argmax_label(const ProbabilityVector& p);

struct Example {
    std::string id;
    ProbabilityVector probs;
    std::optional<Label> gold;
    std::optional<std::string> doc_id;
    std::map<std::string, std::string> groups;
};

struct LabeledBatch {
    std::vector<Example> examples;
    LabelSpace label_space;

    // Enforces uniform k and unique ids.
    LabeledBatch(std::vector<Example> ex, LabelSpace space);

    std::size_t size() const { return examples.size(); }
    bool all_gold() const;
};

// Conformal label set with its renormalized in-set distribution.
// members and weights are aligned; members sorted ascending.
struct PredictionSet {
    std::vector<Label> members;
    std::vector<double> weights;

    PredictionSet(std::vector<Label> members_, std::vector<double> weights_);

    bool contains(Label y) const;
    Label min_member() const { return members.front(); }
    Label max_member() const { return members.back(); }
};

// Build a set from members and the full distribution, renormalizing within
// the set. A zero in-set mass degenerates to uniform weights.
PredictionSet make_prediction_set(std::vector<Label> members, const ProbabilityVector& p);

}  // namespace ordcp
