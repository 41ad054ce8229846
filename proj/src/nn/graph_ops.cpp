#include "tsgraph/nn/graph_ops.hpp"

#include "tsgraph/error.hpp"

#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tsg::nn {

std::shared_ptr<const Adjacency> Adjacency::from_edges(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::vector<std::uint32_t>> lists(n);
    for (std::size_t i = 0; i < n; ++i) lists[i].push_back(static_cast<std::uint32_t>(i));
    for (const auto& e : edges) {
        if (e.i >= n || e.j >= n) throw ShapeError("edge endpoint outside the node range");
        if (e.i == e.j) continue;
        lists[e.i].push_back(e.j);
        lists[e.j].push_back(e.i);
    }
    auto adj = std::make_shared<Adjacency>();
    adj->n = n;
    adj->offsets.reserve(n + 1);
    adj->offsets.push_back(0);
    for (auto& l : lists) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        adj->neighbors.insert(adj->neighbors.end(), l.begin(), l.end());
        adj->offsets.push_back(adj->neighbors.size());
    }
    adj->reverse.resize(adj->neighbors.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = adj->offsets[i]; p < adj->offsets[i + 1]; ++p) {
            const std::size_t j = adj->neighbors[p];
            const auto first = adj->neighbors.begin() + static_cast<std::ptrdiff_t>(adj->offsets[j]);
            const auto last = adj->neighbors.begin() + static_cast<std::ptrdiff_t>(adj->offsets[j + 1]);
            adj->reverse[p] = static_cast<std::size_t>(std::lower_bound(first, last, i) - adj->neighbors.begin());
        }
    }
    return adj;
}

using kernels::gather_accumulate;

namespace {

// a^T [z_i || z_j] = src_i + dst_j
void attention_halves(const Tensor& z, const Tensor& a, std::vector<double>& src, std::vector<double>& dst) {
    const std::size_t n = z.rows(), f = z.cols();
    src.assign(n, 0.0);
    dst.assign(n, 0.0);
    const auto av = a.values();
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = z.values().data() + i * f;
        for (std::size_t k = 0; k < f; ++k) {
            src[i] += av[k] * zi[k];
            dst[i] += av[f + k] * zi[k];
        }
    }
}

// du = d(score) * LeakyReLU'(u), summed into the src/dst halves and pushed back to z and a
void attention_halves_backward(detail::Node& pz, detail::Node& pa, const AdjacencyPtr& adj,
                               const std::vector<double>& dscore, const std::vector<bool>& positive, double slope) {
    const std::size_t n = pz.rows, f = pz.cols;
    std::vector<double> dsrc(n, 0.0), ddst(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = adj->offsets[i]; p < adj->offsets[i + 1]; ++p) {
            const double du = dscore[p] * (positive[p] ? 1.0 : slope);
            dsrc[i] += du;
            ddst[adj->neighbors[p]] += du;
        }
    }
    if (pz.requires_grad) {
        auto& g = pz.ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < f; ++k) g[i * f + k] += dsrc[i] * pa.value[k] + ddst[i] * pa.value[f + k];
        }
    }
    if (pa.requires_grad) {
        auto& g = pa.ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < f; ++k) {
                g[k] += dsrc[i] * pz.value[i * f + k];
                g[f + k] += ddst[i] * pz.value[i * f + k];
            }
        }
    }
}

void check_attention_inputs(const Tensor& z, const Tensor& a, const AdjacencyPtr& adj, const char* who) {
    if (z.rows() != adj->n) throw ShapeError(std::string(who) + ": feature rows do not match the adjacency");
    if (a.size() != 2 * z.cols()) throw ShapeError(std::string(who) + ": attention vector must have 2F entries");
}

}  // namespace

Tensor attention_scores(const Tensor& z, const Tensor& a, const AdjacencyPtr& adj, double slope) {
    check_attention_inputs(z, a, adj, "attention_scores");
    std::vector<double> src, dst;
    attention_halves(z, a, src, dst);
    std::vector<double> out(adj->entry_count());
    std::vector<bool> positive(out.size());
    for (std::size_t i = 0; i < adj->n; ++i) {
        for (std::size_t p = adj->offsets[i]; p < adj->offsets[i + 1]; ++p) {
            const double u = src[i] + dst[adj->neighbors[p]];
            positive[p] = u > 0;
            out[p] = u > 0 ? u : slope * u;
        }
    }
    const std::size_t count = out.size();
    return Tensor::make_result(count, 1, std::move(out), {z, a},
                               [adj, slope, positive = std::move(positive)](detail::Node& self) {
                                   attention_halves_backward(*self.parents[0], *self.parents[1], adj, self.grad,
                                                             positive, slope);
                               });
}

Tensor attention_coefficients(const Tensor& z, const Tensor& a, const AdjacencyPtr& adj, double slope) {
    check_attention_inputs(z, a, adj, "attention_coefficients");
    const std::size_t n = adj->n;
    std::vector<double> src, dst;
    attention_halves(z, a, src, dst);
    std::vector<double> out(adj->entry_count());
    std::vector<bool> positive(out.size());

    // exp(e_ij - m_i) factors into a row term and a column term on each side of
    // the LeakyReLU kink; shifting dst by its maximum keeps the column terms <= 1
    const double top = n ? *std::max_element(dst.begin(), dst.end()) : 0.0;
    const double spread = n ? top - *std::min_element(dst.begin(), dst.end()) : 0.0;
    const bool factored = std::isfinite(spread) && spread < 600.0 && slope >= 0.0 && slope <= 1.0;
    std::vector<double> col_pos, col_neg;
    if (factored) {
        col_pos.resize(n);
        col_neg.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            col_pos[j] = std::exp(dst[j] - top);
            col_neg[j] = std::exp(slope * (dst[j] - top));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = adj->offsets[i], hi = adj->offsets[i + 1];
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t p = lo; p < hi; ++p) {
            const double u = src[i] + dst[adj->neighbors[p]];
            positive[p] = u > 0;
            out[p] = u > 0 ? u : slope * u;
            mx = std::max(mx, out[p]);
        }
        const double row_pos_arg = src[i] + top - mx, row_neg_arg = slope * (src[i] + top) - mx;
        if (factored && row_pos_arg < 600.0 && row_neg_arg < 600.0) {
            const double row_pos = std::exp(row_pos_arg), row_neg = std::exp(row_neg_arg);
            for (std::size_t p = lo; p < hi; ++p) {
                const std::size_t j = adj->neighbors[p];
                out[p] = positive[p] ? row_pos * col_pos[j] : row_neg * col_neg[j];
            }
        } else {
            for (std::size_t p = lo; p < hi; ++p) out[p] = std::exp(out[p] - mx);
        }
        double s = 0.0;
        for (std::size_t p = lo; p < hi; ++p) s += out[p];
        for (std::size_t p = lo; p < hi; ++p) out[p] /= s;
    }
    const std::size_t count = out.size();
    return Tensor::make_result(count, 1, std::move(out), {z, a},
                               [adj, slope, positive = std::move(positive)](detail::Node& self) {
                                   std::vector<double> de(self.value.size());
                                   for (std::size_t i = 0; i < adj->n; ++i) {
                                       const std::size_t lo = adj->offsets[i], hi = adj->offsets[i + 1];
                                       double dot = 0.0;
                                       for (std::size_t p = lo; p < hi; ++p) dot += self.value[p] * self.grad[p];
                                       for (std::size_t p = lo; p < hi; ++p) {
                                           de[p] = self.value[p] * (self.grad[p] - dot);
                                       }
                                   }
                                   attention_halves_backward(*self.parents[0], *self.parents[1], adj, de, positive,
                                                             slope);
                               });
}

Tensor attention_normalize(const Tensor& scores, const AdjacencyPtr& adj) {
    if (scores.size() != adj->entry_count()) throw ShapeError("attention_normalize: score count mismatch");
    const auto e = scores.values();
    std::vector<double> out(e.size());
    for (std::size_t i = 0; i < adj->n; ++i) {
        const std::size_t lo = adj->offsets[i], hi = adj->offsets[i + 1];
        const double mx = *std::max_element(e.begin() + static_cast<std::ptrdiff_t>(lo),
                                            e.begin() + static_cast<std::ptrdiff_t>(hi));
        double z = 0.0;
        for (std::size_t p = lo; p < hi; ++p) {
            out[p] = std::exp(e[p] - mx);
            z += out[p];
        }
        for (std::size_t p = lo; p < hi; ++p) out[p] /= z;
    }
    const std::size_t count = out.size();
    return Tensor::make_result(count, 1, std::move(out), {scores}, [adj](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < adj->n; ++i) {
            const std::size_t lo = adj->offsets[i], hi = adj->offsets[i + 1];
            double dot = 0.0;
            for (std::size_t p = lo; p < hi; ++p) dot += self.value[p] * self.grad[p];
            for (std::size_t p = lo; p < hi; ++p) g[p] += self.value[p] * (self.grad[p] - dot);
        }
    });
}

Tensor attention_aggregate(const Tensor& alpha, const Tensor& z, const AdjacencyPtr& adj) {
    const std::size_t n = z.rows(), f = z.cols();
    if (n != adj->n || alpha.size() != adj->entry_count()) {
        throw ShapeError("attention_aggregate: inputs do not match the adjacency");
    }
    std::vector<double> out(n * f, 0.0);
    const double* zv = z.values().data();
    const double* av = alpha.values().data();
    const std::uint32_t* nb = adj->neighbors.data();
    for (std::size_t i = 0; i < n; ++i) {
        gather_accumulate(
            out.data() + i * f, f, adj->offsets[i], adj->offsets[i + 1], [av](std::size_t p) { return av[p]; },
            [zv, nb, f](std::size_t p) { return zv + nb[p] * f; });
    }
    return Tensor::make_result(n, f, std::move(out), {alpha, z}, [adj, n, f](detail::Node& self) {
        auto& palpha = *self.parents[0];
        auto& pz = *self.parents[1];
        const std::uint32_t* nb = adj->neighbors.data();
        const double* d = self.grad.data();
        if (palpha.requires_grad) {
            auto& g = palpha.ensure_grad();
            const double* zv = pz.value.data();
            for (std::size_t i = 0; i < n; ++i) {
                const double* di = d + i * f;
                for (std::size_t p = adj->offsets[i]; p < adj->offsets[i + 1]; ++p) {
                    g[p] += kernels::dot(di, zv + nb[p] * f, f);
                }
            }
        }
        if (pz.requires_grad) {
            // dz_j = sum over i with j in N(i) of alpha_ij d_i; neighborhoods are
            // symmetric, so this walks row j and reads alpha through `reverse`.
            auto& g = pz.ensure_grad();
            const double* av = palpha.value.data();
            const std::size_t* rev = adj->reverse.data();
            for (std::size_t j = 0; j < n; ++j) {
                gather_accumulate(
                    g.data() + j * f, f, adj->offsets[j], adj->offsets[j + 1],
                    [av, rev](std::size_t q) { return av[rev[q]]; }, [d, nb, f](std::size_t q) { return d + nb[q] * f; });
            }
        }
    });
}

}  // namespace tsg::nn
