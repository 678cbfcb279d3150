#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/ingest.hpp"
#include "wafboost/mockwaf.hpp"

namespace wafboost {

/// Hashed character n-gram feature space.
struct FeatureSpec {
    std::size_t ngram_min = 1;
    std::size_t ngram_max = 4;
    std::size_t hash_buckets = 1u << 18;  // power of two
    std::uint64_t hash_seed = 0x5AFEC0DEULL;
};

/// Binary classifier state: logistic regression over hashed n-grams.
/// Rejected is the positive class.
struct ShadowModel {
    FeatureSpec spec;
    std::vector<double> weights;  // length spec.hash_buckets
    double bias = 0.0;
    double threshold = 0.5;
    bool fitted = false;
};

struct TrainConfig {
    std::size_t epochs = 50;
    double learning_rate = 0.05;  // constant schedule
    std::size_t batch_size = 32;
    double l2 = 0.0;
    std::uint64_t rng_seed = 1;
};

namespace detail {

// FNV-1a over the n-gram bytes, seeded; masked into the bucket range.
inline std::uint32_t hash_ngram(const char* data, std::size_t len, std::uint64_t seed,
                                std::size_t buckets) {
    std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ULL;
    }
    return static_cast<std::uint32_t>(h & (buckets - 1));
}

}  // namespace detail

/// Sparse feature counts, sorted by bucket so dot products accumulate in
/// a fixed order (bit-reproducible scores).
using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

inline SparseVec featurize(const FeatureSpec& spec, const Payload& p) {
    std::vector<std::uint32_t> hits;
    const std::string& s = p.raw;
    for (std::size_t n = spec.ngram_min; n <= spec.ngram_max; ++n) {
        if (s.size() < n) break;
        for (std::size_t i = 0; i + n <= s.size(); ++i)
            hits.push_back(detail::hash_ngram(s.data() + i, n, spec.hash_seed, spec.hash_buckets));
    }
    std::sort(hits.begin(), hits.end());
    SparseVec out;
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        out.emplace_back(hits[i], static_cast<double>(j - i));
        i = j;
    }
    return out;
}

inline double feature_mass(const SparseVec& v) {
    double m = 0.0;
    for (const auto& [k, c] : v) m += c;
    return m;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Raw decision score in [0, 1] plus the thresholded label.
inline std::pair<double, Label> predict(const ShadowModel& m, const Payload& p) {
    double z = m.bias;
    for (const auto& [k, c] : featurize(m.spec, p)) z += m.weights[k] * c;
    double score = sigmoid(z);
    return {score, score >= m.threshold ? Label::Rejected : Label::Accepted};
}

struct TrainTrace {
    std::vector<double> epoch_loss;  // mean BCE per epoch
};

/// Fits logistic-regression weights by minimizing mean binary
/// cross-entropy with Adam over shuffled mini-batches. If the label
/// ratio exceeds 4:1 the minority class is oversampled (cyclic
/// repetition) to 1:1 before training. Deterministic given the dataset
/// order and rng seed.
inline ShadowModel train_shadow(const Dataset& ds, const TrainConfig& cfg,
                                const FeatureSpec& spec = {}, TrainTrace* trace = nullptr) {
    std::vector<std::size_t> pos, neg;  // Rejected = positive
    for (std::size_t i = 0; i < ds.payloads.size(); ++i)
        (ds.payloads[i].second == Label::Rejected ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("train_shadow: degenerate labels");

    // Keep the training set balanced when one class dominates.
    std::vector<std::size_t> order;
    order.reserve(pos.size() + neg.size());
    for (std::size_t i = 0; i < ds.payloads.size(); ++i) order.push_back(i);
    const auto& minority = pos.size() < neg.size() ? pos : neg;
    const auto& majority = pos.size() < neg.size() ? neg : pos;
    if (majority.size() > 4 * minority.size()) {
        std::size_t need = majority.size() - minority.size();
        for (std::size_t i = 0; i < need; ++i) order.push_back(minority[i % minority.size()]);
    }

    std::vector<SparseVec> feats(ds.payloads.size());
    std::vector<double> targets(ds.payloads.size());
    for (std::size_t i = 0; i < ds.payloads.size(); ++i) {
        feats[i] = featurize(spec, ds.payloads[i].first);
        targets[i] = ds.payloads[i].second == Label::Rejected ? 1.0 : 0.0;
    }

    ShadowModel model;
    model.spec = spec;
    model.weights.assign(spec.hash_buckets, 0.0);
    model.bias = 0.0;

    // Adam state, allocated lazily per touched bucket.
    std::vector<double> m_w(spec.hash_buckets, 0.0), v_w(spec.hash_buckets, 0.0);
    double m_b = 0.0, v_b = 0.0;
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t step = 0;

    Rng rng(cfg.rng_seed);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform(i)]);
        double loss_sum = 0.0;
        std::size_t loss_n = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            // Accumulate batch gradient over the sparse support.
            std::vector<std::pair<std::uint32_t, double>> grad;
            double grad_b = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                std::size_t idx = order[k];
                double z = model.bias;
                for (const auto& [f, c] : feats[idx]) z += model.weights[f] * c;
                double pr = sigmoid(z);
                double y = targets[idx];
                double err = pr - y;  // d(BCE)/dz
                for (const auto& [f, c] : feats[idx]) grad.emplace_back(f, err * c);
                grad_b += err;
                double clamped = std::min(std::max(pr, 1e-12), 1.0 - 1e-12);
                loss_sum += -(y * std::log(clamped) + (1.0 - y) * std::log(1.0 - clamped));
                ++loss_n;
            }
            std::sort(grad.begin(), grad.end());
            double inv = 1.0 / static_cast<double>(end - start);
            ++step;
            double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t gi = 0; gi < grad.size();) {
                std::uint32_t f = grad[gi].first;
                double gsum = 0.0;
                while (gi < grad.size() && grad[gi].first == f) gsum += grad[gi++].second;
                double g = gsum * inv + cfg.l2 * model.weights[f];
                m_w[f] = beta1 * m_w[f] + (1.0 - beta1) * g;
                v_w[f] = beta2 * v_w[f] + (1.0 - beta2) * g * g;
                model.weights[f] -= cfg.learning_rate * (m_w[f] / bc1) / (std::sqrt(v_w[f] / bc2) + eps);
            }
            double gb = grad_b * inv;
            m_b = beta1 * m_b + (1.0 - beta1) * gb;
            v_b = beta2 * v_b + (1.0 - beta2) * gb * gb;
            model.bias -= cfg.learning_rate * (m_b / bc1) / (std::sqrt(v_b / bc2) + eps);
        }
        if (trace) trace->epoch_loss.push_back(loss_sum / static_cast<double>(loss_n));
    }
    model.fitted = true;
    return model;
}

/// Fraction of the corpus where the shadow prediction agrees with the
/// rule-set verdict.
inline double fidelity(const ShadowModel& m, const RuleSet& rs, const Dataset& corpus) {
    if (corpus.payloads.empty())
        throw std::invalid_argument("fidelity: empty corpus");
    std::size_t agree = 0;
    for (const auto& [p, l] : corpus.payloads)
        if (predict(m, p).second == classify(rs, p)) ++agree;
    return static_cast<double>(agree) / static_cast<double>(corpus.payloads.size());
}

/// Model file: versioned structured text with the feature spec, bias,
/// and only the non-zero weights.
inline void save_shadow(const ShadowModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out.precision(17);
    out << "wafboost-shadow-model v1\n";
    out << "ngram_min " << m.spec.ngram_min << '\n';
    out << "ngram_max " << m.spec.ngram_max << '\n';
    out << "hash_buckets " << m.spec.hash_buckets << '\n';
    out << "hash_seed " << m.spec.hash_seed << '\n';
    out << "threshold " << m.threshold << '\n';
    out << "bias " << m.bias << '\n';
    std::size_t nz = 0;
    for (double w : m.weights)
        if (w != 0.0) ++nz;
    out << "weights " << nz << '\n';
    for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] != 0.0) out << i << ' ' << m.weights[i] << '\n';
}

inline ShadowModel load_shadow(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "wafboost-shadow-model v1")
        throw std::runtime_error(path + ": not a shadow model file");
    ShadowModel m;
    std::string key;
    std::size_t nz = 0;
    while (in >> key) {
        if (key == "ngram_min") in >> m.spec.ngram_min;
        else if (key == "ngram_max") in >> m.spec.ngram_max;
        else if (key == "hash_buckets") in >> m.spec.hash_buckets;
        else if (key == "hash_seed") in >> m.spec.hash_seed;
        else if (key == "threshold") in >> m.threshold;
        else if (key == "bias") in >> m.bias;
        else if (key == "weights") {
            in >> nz;
            break;
        } else {
            throw std::runtime_error(path + ": unknown key '" + key + "'");
        }
    }
    m.weights.assign(m.spec.hash_buckets, 0.0);
    for (std::size_t k = 0; k < nz; ++k) {
        std::size_t idx;
        double w;
        if (!(in >> idx >> w)) throw std::runtime_error(path + ": truncated weights");
        m.weights.at(idx) = w;
    }
    m.fitted = true;
    return m;
}

}  // namespace wafboost
