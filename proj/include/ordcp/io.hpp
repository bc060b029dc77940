#pragma once

// File formats: probability batch CSV/JSONL, threshold JSON, predictions
// CSV, coarse-map config, reports. All writes go through an atomic
// temp-then-rename helper.

#include <filesystem>
#include <string>
#include <vector>

#include "ordcp/conformal.hpp"
#include "ordcp/core.hpp"
#include "ordcp/metrics.hpp"

namespace ordcp::io {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
    ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what)
        : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what) {}
};

// CSV header `id,gold,doc_id,group,p1,...,pK`, or JSONL (by .jsonl/.ndjson
// extension) with the same field names and a `probs` array. Rows whose
// probabilities sum within 1e-2 of 1 are renormalized; worse rows are
// rejected with their line number.
LabeledBatch read_batch(const std::filesystem::path& file, int k);

void write_batch_csv(const std::filesystem::path& file, const LabeledBatch& batch);

// {kind, lambda, alpha, n, tau_hat} with tau_hat null encoding +infinity.
// Calibration scores are not persisted; round-trip restores everything else
// bit-exactly.
void write_threshold(const std::filesystem::path& file, const CalibratedThreshold& tau);
CalibratedThreshold read_threshold(const std::filesystem::path& file);

struct PredictionRow {
    std::string id;
    Label pred = 0;
    Label baseline = 0;
    std::vector<Label> set_members;
};

// `id,pred,baseline,set` with `|`-separated set members.
void write_predictions_csv(const std::filesystem::path& file,
                           const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& file, int k);

struct CoarseMaps {
    CoarseMap acc7, acc5, acc3;
};

// JSON object {"acc7": {"1": 1, ..., "19": 7}, "acc5": ..., "acc3": ...}.
CoarseMaps read_coarse_maps(const std::filesystem::path& file, int k);

void write_report(const std::filesystem::path& json_file, const std::filesystem::path& csv_file,
                  const EvaluationReport& report);

void write_sweep_csv(const std::filesystem::path& file, const std::vector<SweepRow>& rows);

// Per-class first/second counts after a stratified split.
void write_split_manifest(const std::filesystem::path& file, const LabeledBatch& first,
                          const LabeledBatch& second);

// Writes via a sibling temp file and renames into place.
void atomic_write(const std::filesystem::path& file, const std::string& content);

}  // namespace ordcp::io
