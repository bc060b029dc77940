// ordcp: conformal prediction sets over ordinal classifier outputs.
// Subcommands: split, calibrate, predict, evaluate, sweep, synth.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordcp/conformal.hpp"
#include "ordcp/core.hpp"
#include "ordcp/decode.hpp"
#include "ordcp/io.hpp"
#include "ordcp/metrics.hpp"
#include "ordcp/scores.hpp"
#include "ordcp/synth.hpp"

namespace fs = std::filesystem;
using namespace ordcp;

namespace {

// Exit codes: 0 ok, 2 parse, 3 missing gold, 4 bad config, 5 kind mismatch,
// 6 id mismatch.
struct KindMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IdMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string score = "aps";
    double lambda = 0.01;
    double alpha = 0.10;
    int k = 19;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_score = true) {
    if (with_score) {
        cmd->add_option("--score", o.score, "nonconformity score")
            ->check(CLI::IsMember({"naive", "aps", "raps"}));
        cmd->add_option("--lambda", o.lambda, "RAPS rank penalty");
        cmd->add_option("--alpha", o.alpha, "target miscoverage rate");
    }
    cmd->add_option("--k", o.k, "number of ordered labels");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out_dir, "output directory");
}

ScoreKind make_kind(const CommonOpts& o) { return ScoreKind::parse(o.score, o.lambda); }

void ensure_out_dir(const std::string& dir) { fs::create_directories(dir); }

// Average aligned batches by id; every batch must carry the same ids.
LabeledBatch average_batches(const std::vector<LabeledBatch>& batches) {
    const LabeledBatch& ref = batches.front();
    std::vector<Example> merged;
    merged.reserve(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        std::vector<ProbabilityVector> ps;
        ps.reserve(batches.size());
        for (const auto& b : batches) {
            if (b.size() != ref.size() || b.examples[i].id != ref.examples[i].id)
                throw IdMismatchError("inputs do not share aligned ids (row " +
                                      std::to_string(i + 1) + ")");
            ps.push_back(b.examples[i].probs);
        }
        Example e = ref.examples[i];
        e.probs = ensemble_average(ps);
        merged.push_back(std::move(e));
    }
    return LabeledBatch(std::move(merged), ref.label_space);
}

int cmd_split(const std::string& input, double fraction, const CommonOpts& o) {
    const LabeledBatch batch = io::read_batch(input, o.k);
    auto [cal, tune] = stratified_split(batch, fraction, o.seed);
    ensure_out_dir(o.out_dir);
    const fs::path out(o.out_dir);
    io::write_batch_csv(out / "dev_cal.csv", cal);
    io::write_batch_csv(out / "dev_tune.csv", tune);
    io::write_split_manifest(out / "split_manifest.json", cal, tune);
    std::cout << "split: " << cal.size() << " / " << tune.size() << " rows\n";
    return 0;
}

int cmd_calibrate(const std::vector<std::string>& inputs, const std::string& ensemble,
                  const CommonOpts& o) {
    std::vector<LabeledBatch> batches;
    for (const auto& f : inputs) batches.push_back(io::read_batch(f, o.k));
    LabeledBatch cal = ensemble == "average" && batches.size() > 1 ? average_batches(batches)
                                                                   : std::move(batches.front());
    const CalibratedThreshold tau = calibrate(cal, make_kind(o), o.alpha);
    ensure_out_dir(o.out_dir);
    io::write_threshold(fs::path(o.out_dir) / "threshold.json", tau);
    std::cout << "calibrated on " << tau.record.n << " examples, tau_hat = "
              << (tau.is_infinite() ? "inf" : std::to_string(tau.tau_hat)) << "\n";
    return 0;
}

struct PipelineResult {
    std::vector<io::PredictionRow> rows;
    std::vector<PredictionSet> sets;
};

PipelineResult run_pipeline(const LabeledBatch& batch, const CalibratedThreshold& tau,
                            const std::string& decoder) {
    PipelineResult out;
    out.rows.reserve(batch.size());
    out.sets.reserve(batch.size());
    for (const auto& e : batch.examples) {
        PredictionSet s = predict_set(tau, e.probs);
        io::PredictionRow r;
        r.id = e.id;
        r.baseline = argmax_label(e.probs);
        if (decoder == "argmax") {
            r.pred = r.baseline;
        } else if (decoder == "oracle") {
            if (!e.gold) throw MissingGoldError();
            r.pred = decode_oracle(s, *e.gold, decode_mean(s));
        } else {
            r.pred = decode_mean(s);
        }
        r.set_members = s.members;
        out.rows.push_back(std::move(r));
        out.sets.push_back(std::move(s));
    }
    return out;
}

int cmd_predict(const std::vector<std::string>& inputs,
                const std::vector<std::string>& threshold_files, const std::string& ensemble,
                const std::string& decoder, bool emit_weights, const CommonOpts& o) {
    std::vector<LabeledBatch> batches;
    for (const auto& f : inputs) batches.push_back(io::read_batch(f, o.k));
    std::vector<CalibratedThreshold> taus;
    for (const auto& f : threshold_files) {
        CalibratedThreshold tau = io::read_threshold(f);
        if (tau.record.kind.name() != o.score)
            throw KindMismatchError("threshold " + f + " was fitted with '" +
                                    tau.record.kind.name() + "', --score is '" + o.score + "'");
        taus.push_back(std::move(tau));
    }

    PipelineResult result;
    const LabeledBatch* carrier = &batches.front();
    LabeledBatch averaged = batches.front();
    if (ensemble == "average" && batches.size() > 1) {
        averaged = average_batches(batches);
        carrier = &averaged;
        result = run_pipeline(averaged, taus.front(), decoder);
    } else if (ensemble == "vote" && batches.size() > 1) {
        if (taus.size() != batches.size())
            throw std::invalid_argument("vote mode needs one --threshold per --input");
        std::vector<PipelineResult> per_input;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            if (batches[b].size() != batches.front().size())
                throw IdMismatchError("inputs differ in row count");
            per_input.push_back(run_pipeline(batches[b], taus[b], decoder));
        }
        result = per_input.front();  // sets and ids reported from the first input
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            std::vector<Label> votes, base_votes;
            for (const auto& pr : per_input) {
                if (pr.rows[i].id != result.rows[i].id)
                    throw IdMismatchError("inputs do not share aligned ids");
                votes.push_back(pr.rows[i].pred);
                base_votes.push_back(pr.rows[i].baseline);
            }
            result.rows[i].pred = ensemble_vote(votes);
            result.rows[i].baseline = ensemble_vote(base_votes);
        }
    } else {
        result = run_pipeline(batches.front(), taus.front(), decoder);
    }

    ensure_out_dir(o.out_dir);
    const fs::path out(o.out_dir);
    io::write_predictions_csv(out / "predictions.csv", result.rows);

    std::vector<std::pair<std::string, Label>> doc_points;
    for (std::size_t i = 0; i < carrier->size(); ++i)
        if (carrier->examples[i].doc_id)
            doc_points.emplace_back(*carrier->examples[i].doc_id, result.rows[i].pred);
    if (!doc_points.empty()) {
        std::ostringstream doc_csv;
        doc_csv << "doc_id,pred\n";
        for (const auto& [doc, y] : document_level(doc_points)) doc_csv << doc << ',' << y << "\n";
        io::atomic_write(out / "doc_predictions.csv", doc_csv.str());
    }

    if (emit_weights) {
        std::ostringstream jsonl;
        for (std::size_t i = 0; i < result.sets.size(); ++i) {
            nlohmann::json row;
            row["id"] = result.rows[i].id;
            row["members"] = result.sets[i].members;
            row["weights"] = result.sets[i].weights;
            jsonl << row.dump() << "\n";
        }
        io::atomic_write(out / "weights.jsonl", jsonl.str());
    }
    std::cout << "predicted " << result.rows.size() << " rows\n";
    return 0;
}

int cmd_evaluate(const std::string& predictions_file, const std::string& gold_file,
                 const std::string& coarse_maps_file, const CommonOpts& o) {
    const auto rows = io::read_predictions_csv(predictions_file, o.k);
    const LabeledBatch gold_batch = io::read_batch(gold_file, o.k);
    if (!gold_batch.all_gold()) throw MissingGoldError();

    std::map<std::string, const Example*> by_id;
    for (const auto& e : gold_batch.examples) by_id[e.id] = &e;
    if (rows.size() != gold_batch.size())
        throw IdMismatchError("predictions and gold file differ in row count");

    std::vector<Label> golds, preds, baselines;
    std::vector<PredictionSet> sets;
    std::vector<std::vector<std::string>> groups;
    for (const auto& r : rows) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) throw IdMismatchError("id '" + r.id + "' not in gold file");
        const Example& e = *it->second;
        golds.push_back(*e.gold);
        preds.push_back(r.pred);
        baselines.push_back(r.baseline);
        sets.push_back(make_prediction_set(r.set_members, e.probs));
        std::vector<std::string> tags;
        for (const auto& [name, value] : e.groups) tags.push_back(name + "=" + value);
        groups.push_back(std::move(tags));
    }

    io::CoarseMaps maps;
    if (!coarse_maps_file.empty()) {
        maps = io::read_coarse_maps(coarse_maps_file, o.k);
    } else {
        maps = io::CoarseMaps{equal_width_coarse_map("acc7", o.k, std::min(7, o.k)),
                              equal_width_coarse_map("acc5", o.k, std::min(5, o.k)),
                              equal_width_coarse_map("acc3", o.k, std::min(3, o.k))};
    }

    EvaluationReport rep;
    rep.n = static_cast<int>(golds.size());
    rep.qwk = qwk(golds, preds, o.k);
    const BasicMetrics bm = basic_metrics(golds, preds);
    rep.acc = bm.acc;
    rep.adj_acc = bm.adj_acc;
    rep.dist = bm.dist;
    rep.acc7 = coarse_accuracy(golds, preds, maps.acc7);
    rep.acc5 = coarse_accuracy(golds, preds, maps.acc5);
    rep.acc3 = coarse_accuracy(golds, preds, maps.acc3);
    rep.per_group_failure = failure_rates(sets, golds, groups);
    rep.coverage = 1.0 - rep.per_group_failure.at("overall");
    std::size_t total_size = 0;
    for (const auto& s : sets) total_size += s.members.size();
    rep.avg_set_size = static_cast<double>(total_size) / static_cast<double>(sets.size());
    rep.redistribution = redistribution(golds, baselines, preds);

    ensure_out_dir(o.out_dir);
    const fs::path out(o.out_dir);
    io::write_report(out / "report.json", out / "report.csv", rep);
    std::cout << "qwk " << rep.qwk << "  acc " << rep.acc << "  coverage " << rep.coverage
              << "  avg_set_size " << rep.avg_set_size << "\n";
    return 0;
}

int cmd_sweep(const std::string& cal_file, const std::string& tune_file,
              const std::string& scores_csv, const std::string& alphas_csv, const CommonOpts& o) {
    const LabeledBatch cal = io::read_batch(cal_file, o.k);
    const LabeledBatch tune = io::read_batch(tune_file, o.k);

    std::vector<ScoreKind> kinds;
    std::stringstream ks(scores_csv);
    std::string part;
    while (std::getline(ks, part, ',')) kinds.push_back(ScoreKind::parse(part, o.lambda));
    std::vector<double> alphas;
    std::stringstream as(alphas_csv);
    while (std::getline(as, part, ',')) {
        const double a = std::stod(part);
        if (a <= 0.0 || a >= 1.0) throw std::invalid_argument("alpha must lie in (0,1)");
        alphas.push_back(a);
    }

    const auto rows = alpha_sweep(cal, tune, kinds, alphas);
    ensure_out_dir(o.out_dir);
    io::write_sweep_csv(fs::path(o.out_dir) / "sweep.csv", rows);
    std::cout << "sweep: " << rows.size() << " cells\n";
    return 0;
}

int cmd_synth(int n, bool with_groups, bool with_docs, const std::string& out_file,
              const CommonOpts& o) {
    SynthConfig cfg;
    cfg.n = n;
    cfg.k = o.k;
    cfg.seed = o.seed;
    cfg.with_groups = with_groups;
    cfg.with_docs = with_docs;
    io::write_batch_csv(out_file, synth_batch(cfg));
    std::cout << "wrote " << n << " synthetic rows to " << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal prediction sets over ordinal classifier outputs"};
    app.require_subcommand(1);

    CommonOpts o;

    auto* split = app.add_subcommand("split", "stratified calibration/tuning split");
    std::string split_input;
    double fraction = 0.6814;
    split->add_option("--input", split_input, "probability batch file")->required();
    split->add_option("--fraction", fraction, "first-split fraction");
    add_common(split, o, false);

    auto* cal = app.add_subcommand("calibrate", "fit the conformal threshold");
    std::vector<std::string> cal_inputs;
    std::string cal_ensemble = "none";
    cal->add_option("--input", cal_inputs, "calibration batch file(s)")->required();
    cal->add_option("--ensemble", cal_ensemble, "none|average")
        ->check(CLI::IsMember({"none", "average"}));
    add_common(cal, o);

    auto* pred = app.add_subcommand("predict", "build sets and decode labels");
    std::vector<std::string> pred_inputs, threshold_files;
    std::string decoder = "cp_mean", pred_ensemble = "none";
    bool emit_weights = false;
    pred->add_option("--input", pred_inputs, "probability batch file(s)")->required();
    pred->add_option("--threshold", threshold_files, "threshold file(s)")->required();
    pred->add_option("--decoder", decoder, "argmax|cp_mean|oracle")
        ->check(CLI::IsMember({"argmax", "cp_mean", "oracle"}));
    pred->add_option("--ensemble", pred_ensemble, "none|average|vote")
        ->check(CLI::IsMember({"none", "average", "vote"}));
    pred->add_flag("--emit-weights", emit_weights, "write renormalized weights JSONL");
    add_common(pred, o);

    auto* eval = app.add_subcommand("evaluate", "score predictions against gold");
    std::string predictions_file, gold_file, coarse_maps_file;
    eval->add_option("--predictions", predictions_file, "predictions CSV")->required();
    eval->add_option("--gold", gold_file, "gold probability batch file")->required();
    eval->add_option("--coarse-maps", coarse_maps_file, "coarse-bin config JSON");
    add_common(eval, o);

    auto* sweep = app.add_subcommand("sweep", "alpha sweep over score kinds");
    std::string sweep_cal, sweep_tune;
    std::string scores_csv = "naive,aps,raps";
    std::string alphas_csv = "0.05,0.1,0.15,0.2,0.3,0.4,0.5";
    sweep->add_option("--cal", sweep_cal, "calibration batch file")->required();
    sweep->add_option("--tune", sweep_tune, "tuning batch file")->required();
    sweep->add_option("--scores", scores_csv, "comma-separated score kinds");
    sweep->add_option("--alphas", alphas_csv, "comma-separated alpha grid");
    add_common(sweep, o);

    auto* synth = app.add_subcommand("synth", "generate a synthetic fixture");
    int synth_n = 1000;
    bool with_groups = false, with_docs = false;
    std::string synth_out = "fixture.csv";
    synth->add_option("--n", synth_n, "row count");
    synth->add_flag("--groups", with_groups, "attach domain/text-class tags");
    synth->add_flag("--docs", with_docs, "attach document ids");
    synth->add_option("--file", synth_out, "output CSV path");
    add_common(synth, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    try {
        if (*split) return cmd_split(split_input, fraction, o);
        if (*cal) return cmd_calibrate(cal_inputs, cal_ensemble, o);
        if (*pred)
            return cmd_predict(pred_inputs, threshold_files, pred_ensemble, decoder, emit_weights,
                               o);
        if (*eval) return cmd_evaluate(predictions_file, gold_file, coarse_maps_file, o);
        if (*sweep) return cmd_sweep(sweep_cal, sweep_tune, scores_csv, alphas_csv, o);
        if (*synth) return cmd_synth(synth_n, with_groups, with_docs, synth_out, o);
    } catch (const io::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const MissingGoldError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const KindMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const IdMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
