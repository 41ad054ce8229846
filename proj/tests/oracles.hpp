#pragma once

// Reference implementations shared by unit and acceptance tests. They are
// deliberately naive: exhaustive enumeration or dense loops.

#include "tsgraph/matrix.hpp"
#include "tsgraph/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace tsg::oracle {

inline double euclid(const Matrix& x, std::size_t i, const Matrix& y, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.rows(); ++c) s += (x(c, i) - y(c, j)) * (x(c, i) - y(c, j));
    return std::sqrt(s);
}

/// Minimum cost over every monotone warping path, enumerated recursively.
inline double dtw_all_paths(const Matrix& x, const Matrix& y) {
    const std::size_t p = x.cols(), q = y.cols();
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += euclid(x, i, y, j);
        if (acc >= best) return;
        if (i + 1 == p && j + 1 == q) {
            best = acc;
            return;
        }
        if (i + 1 < p && j + 1 < q) walk(i + 1, j + 1, acc);
        if (i + 1 < p) walk(i + 1, j, acc);
        if (j + 1 < q) walk(i, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = nd(rng);
    return m;
}

inline Matrix to_matrix(const nn::Tensor& t) {
    return Matrix(t.rows(), t.cols(), std::vector<double>(t.values().begin(), t.values().end()));
}

inline Matrix dense_matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

/// Dense n x n neighbor mask with self-loops.
inline std::vector<std::vector<bool>> dense_mask(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = true;
    for (const auto& e : edges) m[e.i][e.j] = m[e.j][e.i] = true;
    return m;
}

/// One multi-head attention layer over a dense mask. `alphas` receives the
/// n x n coefficient matrix of each head.
inline Matrix dense_gat_layer(const Matrix& h, const std::vector<std::vector<bool>>& mask,
                              const nn::GatLayerParams& layer, double elu_alpha,
                              std::vector<Matrix>* alphas = nullptr) {
    const std::size_t n = h.rows(), heads = layer.heads();
    std::vector<Matrix> outs;
    for (std::size_t k = 0; k < heads; ++k) {
        const Matrix z = dense_matmul(h, to_matrix(layer.weight[k]));
        const Matrix a = to_matrix(layer.attention[k]);
        const std::size_t f = z.cols();
        Matrix alpha(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> e(n, -std::numeric_limits<double>::infinity());
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (!mask[i][j]) continue;
                double s = 0.0;
                for (std::size_t c = 0; c < f; ++c) s += a(c, 0) * z(i, c) + a(f + c, 0) * z(j, c);
                e[j] = s > 0 ? s : layer.leaky_slope * s;
                mx = std::max(mx, e[j]);
            }
            double denom = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (mask[i][j]) denom += std::exp(e[j] - mx);
            for (std::size_t j = 0; j < n; ++j) alpha(i, j) = mask[i][j] ? std::exp(e[j] - mx) / denom : 0.0;
        }
        Matrix out = dense_matmul(alpha, z);
        for (auto& v : out.data()) v = v > 0 ? v : elu_alpha * (std::exp(v) - 1.0);
        outs.push_back(std::move(out));
        if (alphas) alphas->push_back(std::move(alpha));
    }
    if (heads == 1) return outs.front();
    const std::size_t f = outs.front().cols();
    if (layer.merge == nn::HeadMerge::mean) {
        Matrix avg(n, f);
        for (const auto& o : outs)
            for (std::size_t q = 0; q < avg.data().size(); ++q) avg.data()[q] += o.data()[q] / heads;
        return avg;
    }
    Matrix cat(n, f * heads);
    for (std::size_t k = 0; k < heads; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < f; ++c) cat(i, k * f + c) = outs[k](i, c);
    return cat;
}

inline double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// LSTM over the rows of `seq` from zero state; gates act on [h || x].
inline std::vector<double> dense_lstm(const Matrix& seq, const nn::LstmParams& p) {
    const std::size_t hd = p.hidden(), d = seq.cols();
    const Matrix wi = to_matrix(p.w_input), wf = to_matrix(p.w_forget), wo = to_matrix(p.w_output),
                 wc = to_matrix(p.w_candidate);
    const Matrix bi = to_matrix(p.b_input), bf = to_matrix(p.b_forget), bo = to_matrix(p.b_output),
                 bc = to_matrix(p.b_candidate);
    std::vector<double> h(hd, 0.0), c(hd, 0.0);
    for (std::size_t t = 0; t < seq.rows(); ++t) {
        std::vector<double> hx(h);
        for (std::size_t k = 0; k < d; ++k) hx.push_back(seq(t, k));
        std::vector<double> nh(hd), nc(hd);
        for (std::size_t u = 0; u < hd; ++u) {
            double gi = bi(0, u), gf = bf(0, u), go = bo(0, u), gc = bc(0, u);
            for (std::size_t r = 0; r < hx.size(); ++r) {
                gi += hx[r] * wi(r, u);
                gf += hx[r] * wf(r, u);
                go += hx[r] * wo(r, u);
                gc += hx[r] * wc(r, u);
            }
            nc[u] = sigm(gf) * c[u] + sigm(gi) * std::tanh(gc);
            nh[u] = sigm(go) * std::tanh(nc[u]);
        }
        h = nh;
        c = nc;
    }
    return h;
}

/// Full classifier forward pass with dense loops; returns log-probabilities.
inline std::vector<double> dense_forward(const nn::Model& model, const SimilarityGraph& g) {
    const auto& cfg = model.config();
    const std::size_t n = g.node_count();
    Matrix h(n, g.feature_dim());
    for (std::size_t q = 0; q < h.data().size(); ++q) h.data()[q] = g.node_features[q];
    const auto mask = dense_mask(n, g.edges);
    for (const auto& layer : model.gat_layers()) h = dense_gat_layer(h, mask, layer, cfg.elu_alpha);
    Matrix seq;
    if (cfg.lstm_input == nn::LstmInput::node_sequence) {
        seq = h;
    } else {
        std::vector<double> pooled(h.cols(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < h.cols(); ++c) pooled[c] += h(i, c) / static_cast<double>(n);
        seq = Matrix(cfg.seq_len, h.cols() / cfg.seq_len, pooled);
    }
    const auto hidden = dense_lstm(seq, model.lstm());
    const Matrix w = to_matrix(model.head().weight), b = to_matrix(model.head().bias);
    std::vector<double> logits(w.cols());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < w.cols(); ++c) {
        logits[c] = b(0, c);
        for (std::size_t u = 0; u < hidden.size(); ++u) logits[c] += hidden[u] * w(u, c);
        mx = std::max(mx, logits[c]);
    }
    double z = 0.0;
    for (double v : logits) z += std::exp(v - mx);
    for (auto& v : logits) v = v - mx - std::log(z);
    return logits;
}

}  // namespace tsg::oracle
