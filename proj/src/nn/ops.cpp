#include "tsgraph/nn/ops.hpp"

#include "tsgraph/error.hpp"

#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsg::nn {

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
    }
}

// y = f(x) elementwise; dfdx(x, y) gives the local derivative.
template <class F, class DF>
Tensor unary(const Tensor& a, F f, DF dfdx) {
    std::vector<double> out(a.size());
    const auto x = a.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
    return Tensor::make_result(a.rows(), a.cols(), std::move(out), {a}, [dfdx](detail::Node& self) {
        auto& p = *self.parents[0];
        auto& g = p.ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
    });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: " + shape_str(a) + " @ " + shape_str(b));
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    const double* av = a.values().data();
    const double* bv = b.values().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = av + i * k;
        kernels::gather_accumulate(
            out.data() + i * n, n, 0, k, [ai](std::size_t l) { return ai[l]; },
            [bv, n](std::size_t l) { return bv + l * n; });
    }
    return Tensor::make_result(m, n, std::move(out), {a, b}, [m, k, n](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        const double* dc = self.grad.data();
        if (pa.requires_grad) {
            auto& ga = pa.ensure_grad();
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t l = 0; l < k; ++l) ga[i * k + l] += kernels::dot(dc + i * n, pb.value.data() + l * n, n);
            }
        }
        if (pb.requires_grad) {
            auto& gb = pb.ensure_grad();
            const double* av = pa.value.data();
            for (std::size_t l = 0; l < k; ++l) {
                kernels::gather_accumulate(
                    gb.data() + l * n, n, 0, m, [av, k, l](std::size_t i) { return av[i * k + l]; },
                    [dc, n](std::size_t i) { return dc + i * n; });
            }
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
    return Tensor::make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](detail::Node& self) {
        for (auto& p : self.parents) {
            if (!p->requires_grad) continue;
            auto& g = p->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Tensor add_row(const Tensor& a, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw ShapeError("add_row: bias " + shape_str(bias) + " for " + shape_str(a));
    }
    const std::size_t r = a.rows(), c = a.cols();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] = a.values()[i * c + j] + bias.values()[j];
    }
    return Tensor::make_result(r, c, std::move(out), {a, bias}, [r, c](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
            }
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
    return Tensor::make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
        }
    });
}

Tensor scale(const Tensor& a, double s) {
    return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor mean_of(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("mean_of: no inputs");
    for (const auto& p : parts) require_same_shape(parts.front(), p, "mean_of");
    const double inv = 1.0 / static_cast<double>(parts.size());
    std::vector<double> out(parts.front().size(), 0.0);
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += p.values()[i];
    }
    for (auto& v : out) v *= inv;
    return Tensor::make_result(parts.front().rows(), parts.front().cols(), std::move(out),
                               {parts.begin(), parts.end()}, [inv](detail::Node& self) {
                                   for (auto& p : self.parents) {
                                       if (!p->requires_grad) continue;
                                       auto& g = p->ensure_grad();
                                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += inv * self.grad[i];
                                   }
                               });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        a,
        [](double x) {
            if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor elu(const Tensor& a, double alpha) {
    return unary(
        a, [alpha](double x) { return x > 0 ? x : alpha * std::expm1(x); },
        [alpha](double x, double y) { return x > 0 ? 1.0 : y + alpha; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
    return unary(
        a, [slope](double x) { return x > 0 ? x : slope * x; },
        [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Tensor concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    const std::size_t r = parts.front().rows();
    std::vector<std::size_t> offsets;
    std::size_t c = 0;
    for (const auto& p : parts) {
        if (p.rows() != r) throw ShapeError("concat_cols: row mismatch");
        offsets.push_back(c);
        c += p.cols();
    }
    std::vector<double> out(r * c);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto pc = parts[k].cols();
        for (std::size_t i = 0; i < r; ++i) {
            std::copy_n(parts[k].values().data() + i * pc, pc, out.data() + i * c + offsets[k]);
        }
    }
    return Tensor::make_result(r, c, std::move(out), {parts.begin(), parts.end()},
                               [r, c, offsets](detail::Node& self) {
                                   for (std::size_t k = 0; k < self.parents.size(); ++k) {
                                       auto& p = *self.parents[k];
                                       if (!p.requires_grad) continue;
                                       auto& g = p.ensure_grad();
                                       for (std::size_t i = 0; i < r; ++i) {
                                           for (std::size_t j = 0; j < p.cols; ++j) {
                                               g[i * p.cols + j] += self.grad[i * c + offsets[k] + j];
                                           }
                                       }
                                   }
                               });
}

Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    const std::size_t c = parts.front().cols();
    std::size_t r = 0;
    std::vector<double> out;
    for (const auto& p : parts) {
        if (p.cols() != c) throw ShapeError("concat_rows: column mismatch");
        r += p.rows();
        out.insert(out.end(), p.values().begin(), p.values().end());
    }
    return Tensor::make_result(r, c, std::move(out), {parts.begin(), parts.end()}, [](detail::Node& self) {
        std::size_t off = 0;
        for (auto& p : self.parents) {
            if (p->requires_grad) {
                auto& g = p->ensure_grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[off + i];
            }
            off += p->value.size();
        }
    });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count) {
    if (begin + count > a.rows()) throw ShapeError("slice_rows: range past " + shape_str(a));
    const std::size_t c = a.cols();
    std::vector<double> out(a.values().begin() + static_cast<std::ptrdiff_t>(begin * c),
                            a.values().begin() + static_cast<std::ptrdiff_t>((begin + count) * c));
    return Tensor::make_result(count, c, std::move(out), {a}, [begin, c](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * c + i] += self.grad[i];
    });
}

Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols) {
    if (rows * cols != a.size()) {
        throw ShapeError("reshape: " + shape_str(a) + " to " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::vector<double> out(a.values().begin(), a.values().end());
    return Tensor::make_result(rows, cols, std::move(out), {a}, [](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
}

Tensor mean_rows(const Tensor& a) {
    const std::size_t r = a.rows(), c = a.cols();
    if (r == 0) throw ArgumentError("mean over zero rows");
    std::vector<double> out(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) out[j] += a.values()[i * c + j];
    }
    const double inv = 1.0 / static_cast<double>(r);
    for (auto& v : out) v *= inv;
    return Tensor::make_result(1, c, std::move(out), {a}, [r, c, inv](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) g[i * c + j] += inv * self.grad[j];
        }
    });
}

Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    return Tensor::make_result(1, 1, {s}, {a}, [](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (auto& v : g) v += self.grad[0];
    });
}

Tensor log_softmax_rows(const Tensor& a) {
    const std::size_t r = a.rows(), c = a.cols();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < r; ++i) {
        const double* x = a.values().data() + i * c;
        const double mx = *std::max_element(x, x + c);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) z += std::exp(x[j] - mx);
        const double lse = mx + std::log(z);
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] = x[j] - lse;
    }
    return Tensor::make_result(r, c, std::move(out), {a}, [r, c](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < r; ++i) {
            double gs = 0.0;
            for (std::size_t j = 0; j < c; ++j) gs += self.grad[i * c + j];
            for (std::size_t j = 0; j < c; ++j) {
                g[i * c + j] += self.grad[i * c + j] - std::exp(self.value[i * c + j]) * gs;
            }
        }
    });
}

Tensor nll_loss(const Tensor& logp, std::span<const int> labels) {
    const std::size_t b = logp.rows(), c = logp.cols();
    if (labels.size() != b) throw ShapeError("nll_loss: label count does not match batch");
    if (b == 0) throw ArgumentError("nll_loss of an empty batch");
    double s = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
            throw ArgumentError("nll_loss: label " + std::to_string(labels[i]) + " out of range");
        }
        s -= logp.values()[i * c + static_cast<std::size_t>(labels[i])];
    }
    const double inv = 1.0 / static_cast<double>(b);
    std::vector<int> lab(labels.begin(), labels.end());
    return Tensor::make_result(1, 1, {s * inv}, {logp}, [lab = std::move(lab), c, inv](detail::Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < lab.size(); ++i) {
            g[i * c + static_cast<std::size_t>(lab[i])] -= inv * self.grad[0];
        }
    });
}

Tensor dropout(const Tensor& a, double p, std::mt19937_64& rng) {
    if (!(p >= 0.0 && p < 1.0)) throw ArgumentError("dropout probability must lie in [0, 1)");
    if (p == 0.0) return a;
    std::bernoulli_distribution keep(1.0 - p);
    std::vector<double> mask(a.size());
    for (auto& m : mask) m = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
    return mul(a, Tensor(a.rows(), a.cols(), std::move(mask)));
}

}  // namespace tsg::nn
