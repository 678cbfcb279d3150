#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/ingest.hpp"

namespace wafboost {

/// Token/integer mapping with reserved ids. Non-reserved ids are
/// assigned to the lexicographically sorted unique corpus tokens, so the
/// mapping is deterministic.
struct Vocab {
    static constexpr int kUnk = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kReserved = 3;

    std::vector<std::string> id_to_token;  // [0..2] reserved names
    std::map<std::string, int> token_to_id;

    std::size_t size() const { return id_to_token.size(); }

    int lookup(const std::string& token) const {
        auto it = token_to_id.find(token);
        return it == token_to_id.end() ? kUnk : it->second;
    }
};

inline Vocab build_vocab(const std::vector<Payload>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
    Vocab v;
    v.id_to_token = {"<unk>", "<bos>", "<eos>"};
    std::vector<std::string> uniq;
    for (const auto& p : corpus)
        for (const auto& t : p.tokens) uniq.push_back(t.text);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& t : uniq) {
        v.token_to_id[t] = static_cast<int>(v.id_to_token.size());
        v.id_to_token.push_back(t);
    }
    return v;
}

/// Single-layer GRU language model over whitespace tokens. All tensors
/// are row-major doubles.
struct GruModel {
    Vocab vocab;
    std::size_t hidden = 0;  // H
    std::size_t emb = 0;     // d_emb

    std::vector<double> E;                // V x emb
    std::vector<double> Wz, Wr, Wh;       // H x emb
    std::vector<double> Uz, Ur, Uh;       // H x H
    std::vector<double> bz, br, bh;       // H
    std::vector<double> Wout;             // V x H
    std::vector<double> bout;             // V

    std::size_t vocab_size() const { return vocab.size(); }
};

namespace detail {

inline void matvec(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                   const double* x, double* out, bool accumulate) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = accumulate ? out[r] : 0.0;
        const double* row = m.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

// out[c] += sum_r m[r][c] * x[r]  (transposed product)
inline void matvec_t(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                     const double* x, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * x[r];
    }
}

inline double sigmoid_g(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace detail

/// One GRU recurrence step followed by the output projection:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   c = tanh(Wh x + Uh (r . h) + bh)
///   h' = (1-z) . h + z . c
/// Pure function of the model and inputs.
inline std::pair<std::vector<double>, std::vector<double>> gru_step(
    const GruModel& m, int token_id, const std::vector<double>& h_prev) {
    if (token_id < 0 || static_cast<std::size_t>(token_id) >= m.vocab_size())
        throw std::invalid_argument("gru_step: token id out of range");
    if (h_prev.size() != m.hidden)
        throw std::invalid_argument("gru_step: hidden state size mismatch");
    const std::size_t H = m.hidden;
    const double* x = m.E.data() + static_cast<std::size_t>(token_id) * m.emb;

    std::vector<double> z(H), r(H), c(H), s(H), h(H);
    detail::matvec(m.Wz, H, m.emb, x, z.data(), false);
    detail::matvec(m.Uz, H, H, h_prev.data(), z.data(), true);
    detail::matvec(m.Wr, H, m.emb, x, r.data(), false);
    detail::matvec(m.Ur, H, H, h_prev.data(), r.data(), true);
    for (std::size_t i = 0; i < H; ++i) {
        z[i] = detail::sigmoid_g(z[i] + m.bz[i]);
        r[i] = detail::sigmoid_g(r[i] + m.br[i]);
        s[i] = r[i] * h_prev[i];
    }
    detail::matvec(m.Wh, H, m.emb, x, c.data(), false);
    detail::matvec(m.Uh, H, H, s.data(), c.data(), true);
    for (std::size_t i = 0; i < H; ++i) {
        c[i] = std::tanh(c[i] + m.bh[i]);
        h[i] = (1.0 - z[i]) * h_prev[i] + z[i] * c[i];
    }
    std::vector<double> logits(m.vocab_size());
    detail::matvec(m.Wout, m.vocab_size(), H, h.data(), logits.data(), false);
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += m.bout[i];
    return {std::move(h), std::move(logits)};
}

/// Numerically stable softmax; output sums to 1.
inline std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

struct GenTrainConfig {
    double lr0 = 0.001;          // halved every 10 epochs
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    std::size_t hidden = 64;
    std::size_t emb = 32;
    double dropout_keep = 0.7;   // inverted dropout on the embedding output
    std::uint64_t rng_seed = 1;

    /// Hyperparameters as reported for the original sequence model.
    static GenTrainConfig paper_preset() {
        GenTrainConfig c;
        c.batch_size = 512;
        c.hidden = 256;
        c.emb = 64;
        return c;
    }
};

/// Parameter-shaped gradient buffers.
struct GruGradients {
    std::vector<double> E, Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh, Wout, bout;

    void zero_like(const GruModel& m) {
        E.assign(m.E.size(), 0.0);
        Wz.assign(m.Wz.size(), 0.0);
        Wr.assign(m.Wr.size(), 0.0);
        Wh.assign(m.Wh.size(), 0.0);
        Uz.assign(m.Uz.size(), 0.0);
        Ur.assign(m.Ur.size(), 0.0);
        Uh.assign(m.Uh.size(), 0.0);
        bz.assign(m.bz.size(), 0.0);
        br.assign(m.br.size(), 0.0);
        bh.assign(m.bh.size(), 0.0);
        Wout.assign(m.Wout.size(), 0.0);
        bout.assign(m.bout.size(), 0.0);
    }
};

namespace detail {

struct StepCache {
    int input_id = 0;
    std::vector<double> x;  // embedding after dropout scaling
    std::vector<double> mask;
    std::vector<double> z, r, s, c, h_prev, h;
    std::vector<double> probs;
    int target = 0;
};

}  // namespace detail

/// Forward + backward over one id sequence (inputs ids[0..L-2], targets
/// ids[1..L-1]). Returns summed cross-entropy; token_count gets the
/// number of predicted tokens. Dropout masks, when enabled, come from
/// the rng (training only); pass keep=1 for evaluation or gradient
/// checking.
inline double gru_sequence_pass(const GruModel& m, const std::vector<int>& ids,
                                double dropout_keep, Rng* rng, GruGradients* grads,
                                std::size_t* token_count) {
    const std::size_t H = m.hidden, D = m.emb, V = m.vocab_size();
    const std::size_t steps = ids.size() - 1;
    if (token_count) *token_count += steps;

    std::vector<detail::StepCache> cache(steps);
    std::vector<double> h(H, 0.0);
    double loss = 0.0;

    for (std::size_t t = 0; t < steps; ++t) {
        auto& sc = cache[t];
        sc.input_id = ids[t];
        sc.target = ids[t + 1];
        sc.h_prev = h;
        sc.x.assign(m.E.begin() + sc.input_id * static_cast<std::ptrdiff_t>(D),
                    m.E.begin() + (sc.input_id + 1) * static_cast<std::ptrdiff_t>(D));
        if (dropout_keep < 1.0 && rng) {
            sc.mask.resize(D);
            for (std::size_t i = 0; i < D; ++i) {
                sc.mask[i] = rng->uniform_real() < dropout_keep ? 1.0 / dropout_keep : 0.0;
                sc.x[i] *= sc.mask[i];
            }
        }
        sc.z.assign(H, 0.0);
        sc.r.assign(H, 0.0);
        sc.c.assign(H, 0.0);
        sc.s.assign(H, 0.0);
        detail::matvec(m.Wz, H, D, sc.x.data(), sc.z.data(), false);
        detail::matvec(m.Uz, H, H, sc.h_prev.data(), sc.z.data(), true);
        detail::matvec(m.Wr, H, D, sc.x.data(), sc.r.data(), false);
        detail::matvec(m.Ur, H, H, sc.h_prev.data(), sc.r.data(), true);
        for (std::size_t i = 0; i < H; ++i) {
            sc.z[i] = detail::sigmoid_g(sc.z[i] + m.bz[i]);
            sc.r[i] = detail::sigmoid_g(sc.r[i] + m.br[i]);
            sc.s[i] = sc.r[i] * sc.h_prev[i];
        }
        detail::matvec(m.Wh, H, D, sc.x.data(), sc.c.data(), false);
        detail::matvec(m.Uh, H, H, sc.s.data(), sc.c.data(), true);
        sc.h.resize(H);
        for (std::size_t i = 0; i < H; ++i) {
            sc.c[i] = std::tanh(sc.c[i] + m.bh[i]);
            sc.h[i] = (1.0 - sc.z[i]) * sc.h_prev[i] + sc.z[i] * sc.c[i];
        }
        std::vector<double> logits(V);
        detail::matvec(m.Wout, V, H, sc.h.data(), logits.data(), false);
        for (std::size_t i = 0; i < V; ++i) logits[i] += m.bout[i];
        sc.probs = softmax(logits);
        double p = std::max(sc.probs[static_cast<std::size_t>(sc.target)], 1e-300);
        loss += -std::log(p);
        h = sc.h;
    }

    if (!grads) return loss;

    std::vector<double> dh(H, 0.0), dz(H), dc(H), da_h(H), ds(H), dr(H), da_r(H), da_z(H),
        dh_prev(H), dx(D);
    for (std::size_t t = steps; t-- > 0;) {
        const auto& sc = cache[t];
        // Output layer: dlogits = probs - onehot(target)
        std::vector<double> dlogits = sc.probs;
        dlogits[static_cast<std::size_t>(sc.target)] -= 1.0;
        for (std::size_t v = 0; v < V; ++v) {
            double g = dlogits[v];
            if (g == 0.0) continue;
            grads->bout[v] += g;
            double* wrow = grads->Wout.data() + v * H;
            const double* hrow = sc.h.data();
            for (std::size_t i = 0; i < H; ++i) wrow[i] += g * hrow[i];
        }
        detail::matvec_t(m.Wout, V, H, dlogits.data(), dh.data());

        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        std::fill(dx.begin(), dx.end(), 0.0);
        for (std::size_t i = 0; i < H; ++i) {
            dz[i] = dh[i] * (sc.c[i] - sc.h_prev[i]);
            dc[i] = dh[i] * sc.z[i];
            dh_prev[i] = dh[i] * (1.0 - sc.z[i]);
            da_h[i] = dc[i] * (1.0 - sc.c[i] * sc.c[i]);
            da_z[i] = dz[i] * sc.z[i] * (1.0 - sc.z[i]);
        }
        std::fill(ds.begin(), ds.end(), 0.0);
        detail::matvec_t(m.Uh, H, H, da_h.data(), ds.data());
        for (std::size_t i = 0; i < H; ++i) {
            dr[i] = ds[i] * sc.h_prev[i];
            dh_prev[i] += ds[i] * sc.r[i];
            da_r[i] = dr[i] * sc.r[i] * (1.0 - sc.r[i]);
        }
        for (std::size_t i = 0; i < H; ++i) {
            grads->bz[i] += da_z[i];
            grads->br[i] += da_r[i];
            grads->bh[i] += da_h[i];
            double* wz = grads->Wz.data() + i * D;
            double* wr = grads->Wr.data() + i * D;
            double* wh = grads->Wh.data() + i * D;
            for (std::size_t d = 0; d < D; ++d) {
                wz[d] += da_z[i] * sc.x[d];
                wr[d] += da_r[i] * sc.x[d];
                wh[d] += da_h[i] * sc.x[d];
            }
            double* uz = grads->Uz.data() + i * H;
            double* ur = grads->Ur.data() + i * H;
            double* uh = grads->Uh.data() + i * H;
            for (std::size_t j = 0; j < H; ++j) {
                uz[j] += da_z[i] * sc.h_prev[j];
                ur[j] += da_r[i] * sc.h_prev[j];
                uh[j] += da_h[i] * sc.s[j];
            }
        }
        detail::matvec_t(m.Uz, H, H, da_z.data(), dh_prev.data());
        detail::matvec_t(m.Ur, H, H, da_r.data(), dh_prev.data());
        detail::matvec_t(m.Wz, H, D, da_z.data(), dx.data());
        detail::matvec_t(m.Wr, H, D, da_r.data(), dx.data());
        detail::matvec_t(m.Wh, H, D, da_h.data(), dx.data());
        double* erow = grads->E.data() + sc.input_id * static_cast<std::ptrdiff_t>(D);
        if (!sc.mask.empty()) {
            for (std::size_t d = 0; d < D; ++d) erow[d] += dx[d] * sc.mask[d];
        } else {
            for (std::size_t d = 0; d < D; ++d) erow[d] += dx[d];
        }
        dh = dh_prev;
    }
    return loss;
}

namespace detail {

struct AdamTensor {
    std::vector<double> m, v;
    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }
    void step(std::vector<double>& w, const std::vector<double>& g, double lr,
              std::uint64_t t) {
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
};

}  // namespace detail

/// Frames each payload as BOS tokens EOS and maps through the vocab.
inline std::vector<std::vector<int>> frame_sequences(const Vocab& vocab,
                                                     const std::vector<Payload>& corpus) {
    std::vector<std::vector<int>> seqs;
    seqs.reserve(corpus.size());
    for (const auto& p : corpus) {
        std::vector<int> ids;
        ids.reserve(p.tokens.size() + 2);
        ids.push_back(Vocab::kBos);
        for (const auto& t : p.tokens) ids.push_back(vocab.lookup(t.text));
        ids.push_back(Vocab::kEos);
        seqs.push_back(std::move(ids));
    }
    return seqs;
}

/// Mean next-token cross-entropy of the model on a corpus (no dropout).
inline double generator_loss(const GruModel& m, const std::vector<Payload>& corpus) {
    auto seqs = frame_sequences(m.vocab, corpus);
    double loss = 0.0;
    std::size_t tokens = 0;
    for (const auto& ids : seqs) loss += gru_sequence_pass(m, ids, 1.0, nullptr, nullptr, &tokens);
    return loss / static_cast<double>(tokens);
}

struct TrainTraceGen {
    std::vector<double> epoch_loss;  // mean per-token CE per epoch
};

/// Trains the GRU by minimizing next-token cross-entropy with Adam,
/// backpropagation through time truncated at sequence boundaries, and
/// the halving learning-rate schedule. Deterministic given the seed.
inline GruModel train_generator(const std::vector<Payload>& corpus, const GenTrainConfig& cfg,
                                TrainTraceGen* trace = nullptr) {
    if (corpus.empty()) throw std::invalid_argument("train_generator: empty corpus");
    Vocab vocab = build_vocab(corpus);
    if (vocab.size() < Vocab::kReserved + 2)
        throw std::invalid_argument("train_generator: vocabulary too small");

    GruModel m;
    m.vocab = std::move(vocab);
    m.hidden = cfg.hidden;
    m.emb = cfg.emb;
    const std::size_t H = m.hidden, D = m.emb, V = m.vocab_size();

    Rng rng(cfg.rng_seed);
    auto init = [&](std::vector<double>& w, std::size_t n) {
        w.resize(n);
        for (double& x : w) x = rng.uniform_real(-0.08, 0.08);
    };
    init(m.E, V * D);
    init(m.Wz, H * D);
    init(m.Wr, H * D);
    init(m.Wh, H * D);
    init(m.Uz, H * H);
    init(m.Ur, H * H);
    init(m.Uh, H * H);
    m.bz.assign(H, 0.0);
    m.br.assign(H, 0.0);
    m.bh.assign(H, 0.0);
    init(m.Wout, V * H);
    m.bout.assign(V, 0.0);

    auto seqs = frame_sequences(m.vocab, corpus);
    std::vector<std::size_t> order(seqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    GruGradients grads;
    detail::AdamTensor aE, aWz, aWr, aWh, aUz, aUr, aUh, abz, abr, abh, aWout, about;
    aE.init(m.E.size());
    aWz.init(m.Wz.size());
    aWr.init(m.Wr.size());
    aWh.init(m.Wh.size());
    aUz.init(m.Uz.size());
    aUr.init(m.Ur.size());
    aUh.init(m.Uh.size());
    abz.init(m.bz.size());
    abr.init(m.br.size());
    abh.init(m.bh.size());
    aWout.init(m.Wout.size());
    about.init(m.bout.size());
    std::uint64_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = cfg.lr0 * std::pow(0.5, static_cast<double>(epoch / 10));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform(i)]);
        double epoch_loss = 0.0;
        std::size_t epoch_tokens = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            grads.zero_like(m);
            double batch_loss = 0.0;
            std::size_t batch_tokens = 0;
            for (std::size_t k = start; k < end; ++k)
                batch_loss += gru_sequence_pass(m, seqs[order[k]], cfg.dropout_keep, &rng,
                                                &grads, &batch_tokens);
            epoch_loss += batch_loss;
            epoch_tokens += batch_tokens;
            double inv = 1.0 / static_cast<double>(batch_tokens);
            auto scale = [&](std::vector<double>& g) {
                for (double& x : g) x *= inv;
            };
            scale(grads.E);
            scale(grads.Wz);
            scale(grads.Wr);
            scale(grads.Wh);
            scale(grads.Uz);
            scale(grads.Ur);
            scale(grads.Uh);
            scale(grads.bz);
            scale(grads.br);
            scale(grads.bh);
            scale(grads.Wout);
            scale(grads.bout);
            ++step;
            aE.step(m.E, grads.E, lr, step);
            aWz.step(m.Wz, grads.Wz, lr, step);
            aWr.step(m.Wr, grads.Wr, lr, step);
            aWh.step(m.Wh, grads.Wh, lr, step);
            aUz.step(m.Uz, grads.Uz, lr, step);
            aUr.step(m.Ur, grads.Ur, lr, step);
            aUh.step(m.Uh, grads.Uh, lr, step);
            abz.step(m.bz, grads.bz, lr, step);
            abr.step(m.br, grads.br, lr, step);
            abh.step(m.bh, grads.bh, lr, step);
            aWout.step(m.Wout, grads.Wout, lr, step);
            about.step(m.bout, grads.bout, lr, step);
        }
        if (trace) trace->epoch_loss.push_back(epoch_loss / static_cast<double>(epoch_tokens));
    }
    return m;
}

struct SampleResult {
    Payload payload;
    bool seed_was_unknown = false;
};

/// Autoregressive sampling from softmax(logits / temperature) after
/// consuming BOS and the seed token. temperature == 0 selects the argmax
/// at every step. BOS and UNK are never emitted; EOS terminates the
/// payload and is not included. The emitted payload always begins with
/// the seed token text.
inline SampleResult sample(const GruModel& m, const std::string& seed_token,
                           std::size_t max_len, double temperature, Rng& rng) {
    if (max_len < 1) throw std::invalid_argument("sample: max_len must be >= 1");
    if (temperature < 0.0) throw std::invalid_argument("sample: temperature must be >= 0");
    SampleResult res;
    int seed_id = m.vocab.lookup(seed_token);
    res.seed_was_unknown = seed_id == Vocab::kUnk;

    std::vector<std::string> out_tokens{seed_token};
    std::vector<double> h(m.hidden, 0.0);
    h = gru_step(m, Vocab::kBos, h).first;
    auto [h2, logits] = gru_step(m, seed_id, h);
    h = std::move(h2);

    while (out_tokens.size() < max_len) {
        logits[Vocab::kBos] = -1e300;
        logits[Vocab::kUnk] = -1e300;
        int next;
        if (temperature == 0.0) {
            next = static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                                    logits.begin());
        } else {
            std::vector<double> scaled(logits.size());
            for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / temperature;
            std::vector<double> p = softmax(scaled);
            double u = rng.uniform_real();
            double acc = 0.0;
            next = static_cast<int>(p.size()) - 1;
            for (std::size_t i = 0; i < p.size(); ++i) {
                acc += p[i];
                if (u < acc) {
                    next = static_cast<int>(i);
                    break;
                }
            }
        }
        if (next == Vocab::kEos) break;
        out_tokens.push_back(m.vocab.id_to_token[static_cast<std::size_t>(next)]);
        auto [hn, ln] = gru_step(m, next, h);
        h = std::move(hn);
        logits = std::move(ln);
    }
    res.payload = Payload::from_tokens(out_tokens, Origin::Generated);
    return res;
}

/// Additive-smoothed order-k token model, the finite-context baseline
/// the sequence model is contrasted with. Also serves as a test oracle
/// for the sampling contract.
struct MarkovModel {
    Vocab vocab;
    std::size_t order = 1;
    double alpha = 1.0;
    std::map<std::vector<int>, std::map<int, std::size_t>> counts;

    /// Ids that sampling may emit: every non-reserved token plus EOS.
    std::vector<int> support() const {
        std::vector<int> s{Vocab::kEos};
        for (int i = Vocab::kReserved; i < static_cast<int>(vocab.size()); ++i) s.push_back(i);
        return s;
    }
};

inline MarkovModel train_markov(const std::vector<Payload>& corpus, std::size_t k, double alpha) {
    if (k < 1) throw std::invalid_argument("train_markov: order must be >= 1");
    if (corpus.empty()) throw std::invalid_argument("train_markov: empty corpus");
    MarkovModel m;
    m.vocab = build_vocab(corpus);
    m.order = k;
    m.alpha = alpha;
    for (const auto& p : corpus) {
        std::vector<int> ids(k, Vocab::kBos);
        for (const auto& t : p.tokens) ids.push_back(m.vocab.lookup(t.text));
        ids.push_back(Vocab::kEos);
        for (std::size_t i = k; i < ids.size(); ++i) {
            std::vector<int> ctx(ids.begin() + static_cast<std::ptrdiff_t>(i - k),
                                 ids.begin() + static_cast<std::ptrdiff_t>(i));
            ++m.counts[ctx][ids[i]];
        }
    }
    return m;
}

/// Smoothed conditional distribution over the sampling support for a
/// context window (most recent k ids).
inline std::vector<std::pair<int, double>> markov_distribution(const MarkovModel& m,
                                                               const std::vector<int>& ctx) {
    auto sup = m.support();
    std::vector<std::pair<int, double>> dist;
    dist.reserve(sup.size());
    const std::map<int, std::size_t>* row = nullptr;
    auto it = m.counts.find(ctx);
    if (it != m.counts.end()) row = &it->second;
    double total = 0.0;
    for (int id : sup) {
        std::size_t c = 0;
        if (row) {
            auto cit = row->find(id);
            if (cit != row->end()) c = cit->second;
        }
        double w = static_cast<double>(c) + m.alpha;
        dist.emplace_back(id, w);
        total += w;
    }
    for (auto& [id, w] : dist) w /= total;
    return dist;
}

inline SampleResult sample_markov(const MarkovModel& m, const std::string& seed_token,
                                  std::size_t max_len, Rng& rng) {
    if (max_len < 1) throw std::invalid_argument("sample_markov: max_len must be >= 1");
    SampleResult res;
    int seed_id = m.vocab.lookup(seed_token);
    res.seed_was_unknown = seed_id == Vocab::kUnk;
    std::vector<int> window(m.order, Vocab::kBos);
    auto push = [&](int id) {
        window.erase(window.begin());
        window.push_back(id);
    };
    push(seed_id);
    std::vector<std::string> out_tokens{seed_token};
    while (out_tokens.size() < max_len) {
        auto dist = markov_distribution(m, window);
        double u = rng.uniform_real();
        double acc = 0.0;
        int next = dist.back().first;
        for (const auto& [id, pr] : dist) {
            acc += pr;
            if (u < acc) {
                next = id;
                break;
            }
        }
        if (next == Vocab::kEos) break;
        out_tokens.push_back(m.vocab.id_to_token[static_cast<std::size_t>(next)]);
        push(next);
    }
    res.payload = Payload::from_tokens(out_tokens, Origin::Generated);
    return res;
}

/// Generator model file: vocab plus parameter tensors, row-major decimal.
inline void save_generator(const GruModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out.precision(17);
    out << "wafboost-generator-model v1\n";
    out << "hidden " << m.hidden << " emb " << m.emb << " vocab " << m.vocab.size() << '\n';
    for (std::size_t i = Vocab::kReserved; i < m.vocab.size(); ++i)
        out << m.vocab.id_to_token[i] << '\n';
    auto tensor = [&](const char* name, const std::vector<double>& w) {
        out << name << ' ' << w.size() << '\n';
        for (std::size_t i = 0; i < w.size(); ++i) out << w[i] << (i + 1 == w.size() ? '\n' : ' ');
    };
    tensor("E", m.E);
    tensor("Wz", m.Wz);
    tensor("Wr", m.Wr);
    tensor("Wh", m.Wh);
    tensor("Uz", m.Uz);
    tensor("Ur", m.Ur);
    tensor("Uh", m.Uh);
    tensor("bz", m.bz);
    tensor("br", m.br);
    tensor("bh", m.bh);
    tensor("Wout", m.Wout);
    tensor("bout", m.bout);
}

inline GruModel load_generator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "wafboost-generator-model v1")
        throw std::runtime_error(path + ": not a generator model file");
    GruModel m;
    std::string key;
    std::size_t vocab_n = 0;
    in >> key >> m.hidden >> key >> m.emb >> key >> vocab_n;
    in.ignore();
    m.vocab.id_to_token = {"<unk>", "<bos>", "<eos>"};
    for (std::size_t i = Vocab::kReserved; i < vocab_n; ++i) {
        std::string tok;
        std::getline(in, tok);
        m.vocab.token_to_id[tok] = static_cast<int>(m.vocab.id_to_token.size());
        m.vocab.id_to_token.push_back(tok);
    }
    auto tensor = [&](std::vector<double>& w) {
        std::string name;
        std::size_t n;
        in >> name >> n;
        w.resize(n);
        for (std::size_t i = 0; i < n; ++i) in >> w[i];
    };
    tensor(m.E);
    tensor(m.Wz);
    tensor(m.Wr);
    tensor(m.Wh);
    tensor(m.Uz);
    tensor(m.Ur);
    tensor(m.Uh);
    tensor(m.bz);
    tensor(m.br);
    tensor(m.bh);
    tensor(m.Wout);
    tensor(m.bout);
    if (!in) throw std::runtime_error(path + ": truncated model file");
    return m;
}

}  // namespace wafboost
