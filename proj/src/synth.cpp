#include "ordcp/synth.hpp"

#include <cmath>
#include <random>

namespace ordcp {

namespace {

// Per-class sizes of a 19-level readability dev set; used as the long-tailed
// prior shape when k = 19.
constexpr int kDevClassCounts[19] = {44,  68,  182, 78,  417, 189, 701,  613, 236, 1012,
                                     409, 1491, 349, 1072, 258, 114, 49,  13,  15};

// Discrete posterior-shape grids. Finitely many (shift, sigma) combinations
// give the score distribution atoms.
constexpr double kSigmaGrid[2] = {0.8, 1.6};
constexpr int kShifts[5] = {-2, -1, 0, 1, 2};
constexpr double kShiftCdf[5] = {0.07, 0.27, 0.73, 0.93, 1.0};

// Uniform doubles on top of mt19937_64; the standard distributions are
// implementation-defined, this is not.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

    int categorical(const std::vector<double>& cdf) {
        const double u = uniform();
        for (std::size_t i = 0; i < cdf.size(); ++i)
            if (u < cdf[i]) return static_cast<int>(i);
        return static_cast<int>(cdf.size()) - 1;
    }
};

std::vector<double> prior_cdf(int k) {
    std::vector<double> w(static_cast<std::size_t>(k));
    if (k == 19) {
        for (int i = 0; i < 19; ++i) w[static_cast<std::size_t>(i)] = kDevClassCounts[i];
    } else {
        // Generic long tail peaking mid-range.
        for (int i = 0; i < k; ++i) {
            const double x = (i + 1.0) / k;
            w[static_cast<std::size_t>(i)] = std::exp(-6.0 * (x - 0.6) * (x - 0.6)) + 0.05;
        }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    double cum = 0.0;
    for (double& v : w) {
        cum += v / sum;
        v = cum;
    }
    return w;
}

}  // namespace

LabeledBatch synth_batch(const SynthConfig& cfg) {
    Rng rng(cfg.seed);
    const auto cdf = prior_cdf(cfg.k);
    const char* domains[] = {"arts", "stem", "social"};
    const char* text_classes[] = {"advanced", "foundational", "specialized"};

    std::vector<Example> examples;
    examples.reserve(static_cast<std::size_t>(cfg.n));
    int doc_counter = 0, doc_remaining = 0;
    for (int i = 0; i < cfg.n; ++i) {
        const Label gold = static_cast<Label>(rng.categorical(cdf) + 1);
        const double sigma = kSigmaGrid[static_cast<int>(rng.uniform() * 2.0) % 2];
        const double u = rng.uniform();
        int shift = kShifts[4];
        for (int s = 0; s < 5; ++s)
            if (u < kShiftCdf[s]) {
                shift = kShifts[s];
                break;
            }
        const int center = gold + shift;

        std::vector<double> raw(static_cast<std::size_t>(cfg.k));
        for (int y = 1; y <= cfg.k; ++y) {
            const double d = y - center;
            raw[static_cast<std::size_t>(y - 1)] = std::exp(-d * d / (2.0 * sigma * sigma));
        }

        // Quantize to the dyadic grid 2^-11 and fold the residual into the
        // largest entry. Equal shapes then produce bitwise-equal scores, so
        // the score distribution has real atoms.
        std::vector<double> probs = normalize(raw).values();
        constexpr double grid = 2048.0;
        double sum = 0.0;
        std::size_t top = 0;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            probs[j] = std::round(probs[j] * grid) / grid;
            sum += probs[j];
            if (probs[j] > probs[top]) top = j;
        }
        probs[top] += 1.0 - sum;

        Example e{"s" + std::to_string(i), ProbabilityVector(probs), gold, std::nullopt, {}};
        if (cfg.with_groups) {
            e.groups["domain"] = domains[static_cast<int>(rng.uniform() * 3.0) % 3];
            e.groups["text_class"] = text_classes[static_cast<int>(rng.uniform() * 3.0) % 3];
        }
        if (cfg.with_docs) {
            if (doc_remaining == 0) {
                ++doc_counter;
                doc_remaining = 1 + static_cast<int>(rng.uniform() * 5.0);
            }
            e.doc_id = "d" + std::to_string(doc_counter);
            --doc_remaining;
        }
        examples.push_back(std::move(e));
    }
    return LabeledBatch(std::move(examples), LabelSpace(cfg.k));
}

}  // namespace ordcp
