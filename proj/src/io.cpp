#include "ordcp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace ordcp::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& s, const fs::path& file, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError(file, line, "not a number: '" + s + "'");
    return v;
}

std::map<std::string, std::string> parse_groups(const std::string& cell) {
    std::map<std::string, std::string> groups;
    if (cell.empty()) return groups;
    std::stringstream ss(cell);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            groups["group"] = part;
        else
            groups[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return groups;
}

std::string groups_to_cell(const std::map<std::string, std::string>& groups) {
    if (groups.empty()) return "";
    if (groups.size() == 1 && groups.begin()->first == "group") return groups.begin()->second;
    std::string out;
    for (const auto& [k, v] : groups) {
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

// Ingestion rule: sums within 1e-6 of 1 pass as-is, up to 1e-2 get
// renormalized, anything worse signals upstream corruption.
ProbabilityVector ingest_probs(std::vector<double> probs, const fs::path& file, std::size_t line) {
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < -1e-12) throw ParseError(file, line, "negative probability");
        if (probs[i] < 0.0) probs[i] = 0.0;
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) >= 1e-2)
        throw ParseError(file, line,
                         "probability row sums to " + fmt_double(sum) + ", outside tolerance");
    if (sum <= 0.0) throw ParseError(file, line, "probability row is all zero");
    for (double& p : probs) p /= sum;
    return ProbabilityVector(std::move(probs));
}

Example make_example(std::string id, std::vector<double> probs, const std::string& gold_cell,
                     const std::string& doc_cell, const std::string& group_cell,
                     const fs::path& file, std::size_t line, int k) {
    Example e{std::move(id), ingest_probs(std::move(probs), file, line), std::nullopt,
              std::nullopt, parse_groups(group_cell)};
    if (!gold_cell.empty()) {
        const double g = parse_double(gold_cell, file, line);
        const Label y = static_cast<Label>(g);
        if (g != y || y < 1 || y > k)
            throw ParseError(file, line, "gold label '" + gold_cell + "' outside 1.." +
                                             std::to_string(k));
        e.gold = y;
    }
    if (!doc_cell.empty()) e.doc_id = doc_cell;
    return e;
}

LabeledBatch read_batch_jsonl(const fs::path& file, int k) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::vector<Example> examples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& ex) {
            throw ParseError(file, lineno, ex.what());
        }
        if (!row.contains("id") || !row.contains("probs"))
            throw ParseError(file, lineno, "row needs 'id' and 'probs'");
        std::vector<double> probs = row["probs"].get<std::vector<double>>();
        if (static_cast<int>(probs.size()) != k)
            throw ParseError(file, lineno, "expected " + std::to_string(k) + " probabilities");
        std::string gold_cell, doc_cell, group_cell;
        if (row.contains("gold") && !row["gold"].is_null())
            gold_cell = std::to_string(row["gold"].get<int>());
        if (row.contains("doc_id") && !row["doc_id"].is_null())
            doc_cell = row["doc_id"].get<std::string>();
        if (row.contains("group") && !row["group"].is_null())
            group_cell = row["group"].get<std::string>();
        examples.push_back(make_example(row["id"].get<std::string>(), std::move(probs), gold_cell,
                                        doc_cell, group_cell, file, lineno, k));
    }
    try {
        return LabeledBatch(std::move(examples), LabelSpace(k));
    } catch (const std::exception& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
}

}  // namespace

LabeledBatch read_batch(const fs::path& file, int k) {
    const auto ext = file.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return read_batch_jsonl(file, k);

    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(file, 1, "empty file");
    const auto header = split_csv_line(line);
    const std::size_t expected = 4 + static_cast<std::size_t>(k);
    if (header.size() != expected || header[0] != "id" || header[1] != "gold" ||
        header[2] != "doc_id" || header[3] != "group")
        throw ParseError(file, 1,
                         "expected header id,gold,doc_id,group,p1,...,p" + std::to_string(k));

    std::vector<Example> examples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != expected)
            throw ParseError(file, lineno,
                             "expected " + std::to_string(expected) + " cells, got " +
                                 std::to_string(cells.size()));
        std::vector<double> probs;
        probs.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            probs.push_back(parse_double(cells[4 + static_cast<std::size_t>(i)], file, lineno));
        examples.push_back(make_example(cells[0], std::move(probs), cells[1], cells[2], cells[3],
                                        file, lineno, k));
    }
    try {
        return LabeledBatch(std::move(examples), LabelSpace(k));
    } catch (const std::exception& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
}

void write_batch_csv(const fs::path& file, const LabeledBatch& batch) {
    std::ostringstream out;
    out << "id,gold,doc_id,group";
    for (int i = 1; i <= batch.label_space.k; ++i) out << ",p" << i;
    out << "\n";
    for (const auto& e : batch.examples) {
        out << e.id << ',';
        if (e.gold) out << *e.gold;
        out << ',';
        if (e.doc_id) out << *e.doc_id;
        out << ',' << groups_to_cell(e.groups);
        for (double p : e.probs.values()) out << ',' << fmt_double(p);
        out << "\n";
    }
    atomic_write(file, out.str());
}

void write_threshold(const fs::path& file, const CalibratedThreshold& tau) {
    json doc;
    doc["kind"] = tau.record.kind.name();
    doc["lambda"] = tau.record.kind.lambda;
    doc["alpha"] = tau.record.alpha;
    doc["n"] = tau.record.n;
    if (tau.is_infinite())
        doc["tau_hat"] = nullptr;
    else
        doc["tau_hat"] = tau.tau_hat;
    atomic_write(file, doc.dump(2) + "\n");
}

CalibratedThreshold read_threshold(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
    CalibratedThreshold tau;
    try {
        tau.record.kind = ScoreKind::parse(doc.at("kind").get<std::string>(),
                                           doc.at("lambda").get<double>());
        tau.record.alpha = doc.at("alpha").get<double>();
        tau.record.n = doc.at("n").get<int>();
        tau.tau_hat = doc.at("tau_hat").is_null() ? std::numeric_limits<double>::infinity()
                                                  : doc.at("tau_hat").get<double>();
    } catch (const json::exception& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
    return tau;
}

void write_predictions_csv(const fs::path& file, const std::vector<PredictionRow>& rows) {
    std::ostringstream out;
    out << "id,pred,baseline,set\n";
    for (const auto& r : rows) {
        out << r.id << ',' << r.pred << ',' << r.baseline << ',';
        for (std::size_t i = 0; i < r.set_members.size(); ++i) {
            if (i) out << '|';
            out << r.set_members[i];
        }
        out << "\n";
    }
    atomic_write(file, out.str());
}

std::vector<PredictionRow> read_predictions_csv(const fs::path& file, int k) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(file, 1, "empty file");
    if (split_csv_line(line) != std::vector<std::string>{"id", "pred", "baseline", "set"})
        throw ParseError(file, 1, "expected header id,pred,baseline,set");
    std::vector<PredictionRow> rows;
    std::size_t lineno = 1;
    auto parse_label = [&](const std::string& s) {
        const double v = parse_double(s, file, lineno);
        const Label y = static_cast<Label>(v);
        if (v != y || y < 1 || y > k) throw ParseError(file, lineno, "label out of range: " + s);
        return y;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw ParseError(file, lineno, "expected 4 cells");
        PredictionRow r;
        r.id = cells[0];
        r.pred = parse_label(cells[1]);
        r.baseline = parse_label(cells[2]);
        std::stringstream ss(cells[3]);
        std::string part;
        while (std::getline(ss, part, '|')) r.set_members.push_back(parse_label(part));
        if (r.set_members.empty()) throw ParseError(file, lineno, "empty prediction set");
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

CoarseMap read_one_map(const json& doc, const std::string& name, int k) {
    if (!doc.contains(name)) throw ParseError("coarse map config lacks '" + name + "'");
    CoarseMap m;
    m.name = name;
    m.bins.assign(static_cast<std::size_t>(k), 0);
    for (int y = 1; y <= k; ++y) {
        const std::string key = std::to_string(y);
        if (!doc[name].contains(key))
            throw ParseError("coarse map '" + name + "' missing label " + key);
        m.bins[static_cast<std::size_t>(y - 1)] = doc[name][key].get<int>();
    }
    return m;
}

}  // namespace

CoarseMaps read_coarse_maps(const fs::path& file, int k) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw ParseError(file.string() + ": " + ex.what());
    }
    return CoarseMaps{read_one_map(doc, "acc7", k), read_one_map(doc, "acc5", k),
                      read_one_map(doc, "acc3", k)};
}

void write_report(const fs::path& json_file, const fs::path& csv_file,
                  const EvaluationReport& r) {
    json doc;
    doc["qwk"] = r.qwk;
    doc["acc"] = r.acc;
    doc["adj_acc"] = r.adj_acc;
    doc["dist"] = r.dist;
    doc["acc7"] = r.acc7;
    doc["acc5"] = r.acc5;
    doc["acc3"] = r.acc3;
    doc["coverage"] = r.coverage;
    doc["avg_set_size"] = r.avg_set_size;
    doc["n"] = r.n;
    doc["per_group_failure"] = r.per_group_failure;
    json red;
    red["newly_wrong"] = r.redistribution.newly_wrong;
    red["newly_wrong_adjacent"] = r.redistribution.newly_wrong_adjacent;
    red["improved"] = r.redistribution.improved;
    red["worsened"] = r.redistribution.worsened;
    json hist = json::object();
    for (const auto& [d, f] : r.redistribution.improvement_histogram)
        hist[d >= 4 ? "4+" : std::to_string(d)] = f;
    red["improvement_histogram"] = hist;
    doc["redistribution"] = red;
    atomic_write(json_file, doc.dump(2) + "\n");

    std::ostringstream csv;
    csv << "metric,value\n";
    auto row = [&](const std::string& name, double v) { csv << name << ',' << fmt_double(v) << "\n"; };
    row("qwk", r.qwk);
    row("acc", r.acc);
    row("adj_acc", r.adj_acc);
    row("dist", r.dist);
    row("acc7", r.acc7);
    row("acc5", r.acc5);
    row("acc3", r.acc3);
    row("coverage", r.coverage);
    row("avg_set_size", r.avg_set_size);
    row("n", r.n);
    for (const auto& [tag, rate] : r.per_group_failure) row("failure_rate." + tag, rate);
    row("redistribution.newly_wrong", r.redistribution.newly_wrong);
    row("redistribution.newly_wrong_adjacent", r.redistribution.newly_wrong_adjacent);
    row("redistribution.improved", r.redistribution.improved);
    row("redistribution.worsened", r.redistribution.worsened);
    for (const auto& [d, f] : r.redistribution.improvement_histogram)
        row("redistribution.shrink_" + (d >= 4 ? std::string("4plus") : std::to_string(d)), f);
    atomic_write(csv_file, csv.str());
}

void write_sweep_csv(const fs::path& file, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "kind,alpha,qwk,coverage,avg_set_size\n";
    for (const auto& r : rows)
        out << r.kind << ',' << fmt_double(r.alpha) << ',' << fmt_double(r.qwk) << ','
            << fmt_double(r.coverage) << ',' << fmt_double(r.avg_set_size) << "\n";
    atomic_write(file, out.str());
}

void write_split_manifest(const fs::path& file, const LabeledBatch& first,
                          const LabeledBatch& second) {
    std::map<Label, std::pair<int, int>> counts;
    for (const auto& e : first.examples) ++counts[*e.gold].first;
    for (const auto& e : second.examples) ++counts[*e.gold].second;
    json per_class = json::object();
    int t1 = 0, t2 = 0;
    for (const auto& [label, c] : counts) {
        per_class[std::to_string(label)] = {{"total", c.first + c.second},
                                            {"first", c.first},
                                            {"second", c.second}};
        t1 += c.first;
        t2 += c.second;
    }
    json doc;
    doc["per_class"] = per_class;
    doc["totals"] = {{"total", t1 + t2}, {"first", t1}, {"second", t2}};
    atomic_write(file, doc.dump(2) + "\n");
}

void atomic_write(const fs::path& file, const std::string& content) {
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, file);
}

}  // namespace ordcp::io
