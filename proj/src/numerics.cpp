#include "coknow/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "coknow/kernels.hpp"

namespace coknow {

namespace {

std::string shape_str(const Tensor2& t) {
    return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

} // namespace

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> init) {
    Tensor2 t(init.size(), init.size() ? init.begin()->size() : 0);
    size_t r = 0;
    for (const auto& row : init) {
        if (row.size() != t.cols) throw DimensionError("from_rows: ragged rows");
        std::copy(row.begin(), row.end(), t.row(r++));
    }
    return t;
}

void Tensor2::set_row(size_t r, std::span<const double> values) {
    if (values.size() != cols) throw DimensionError("set_row: length mismatch");
    std::copy(values.begin(), values.end(), row(r));
}

void ensure_finite(const Tensor2& t, const char* op) {
    for (double v : t.data)
        if (!std::isfinite(v)) throw Error(std::string(op) + ": non-finite entry");
}

void ensure_finite(std::span<const double> v, const char* op) {
    for (double x : v)
        if (!std::isfinite(x)) throw Error(std::string(op) + ": non-finite entry");
}

void zero_grads(std::span<Param* const> params) {
    for (Param* p : params) p->zero_grad();
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: " + shape_str(a) + " * " + shape_str(b));
    Tensor2 out(a.rows, b.cols);
    kernels::matmul(a, b, out);
    ensure_finite(out, "matmul");
    return out;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.cols)
        throw DimensionError("matmul_nt: " + shape_str(a) + " * " + shape_str(b) + "^T");
    Tensor2 out(a.rows, b.rows);
    kernels::matmul_nt(a, b, out);
    ensure_finite(out, "matmul_nt");
    return out;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows)
        throw DimensionError("matmul_tn: " + shape_str(a) + "^T * " + shape_str(b));
    Tensor2 out(a.cols, b.cols);
    kernels::matmul_tn(a, b, out);
    ensure_finite(out, "matmul_tn");
    return out;
}

bool NormalizedRows::any_degenerate() const {
    return std::any_of(degenerate.begin(), degenerate.end(), [](uint8_t d) { return d != 0; });
}

NormalizedRows l2_normalize_rows(const Tensor2& a, double eps) {
    NormalizedRows result;
    result.values = Tensor2(a.rows, a.cols);
    result.degenerate.assign(a.rows, 0);
    kernels::l2_normalize_rows(a, eps, result.values, result.degenerate);
    ensure_finite(result.values, "l2_normalize_rows");
    return result;
}

Tensor2 softmax_rows(const Tensor2& logits) {
    ensure_finite(logits, "softmax_rows input");
    Tensor2 out(logits.rows, logits.cols);
    kernels::softmax_rows(logits, out);
    ensure_finite(out, "softmax_rows");
    return out;
}

CrossEntropyResult cross_entropy(const Tensor2& logits, std::span<const size_t> labels) {
    if (labels.size() != logits.rows)
        throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                             std::to_string(logits.rows) + " rows");
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= logits.cols)
            throw InputError("cross_entropy: label " + std::to_string(labels[i]) +
                             " out of range for " + std::to_string(logits.cols) +
                             " classes at row " + std::to_string(i));

    const size_t batch = logits.rows;
    CrossEntropyResult result;
    result.grad = softmax_rows(logits);

    double loss = 0.0;
    for (size_t i = 0; i < batch; ++i) {
        const double* in = logits.row(i);
        double mx = in[0];
        for (size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, in[j]);
        double sum = 0.0;
        for (size_t j = 0; j < logits.cols; ++j) sum += std::exp(in[j] - mx);
        // -log softmax[label] = log(sum exp(x - mx)) - (x[label] - mx)
        loss += std::log(sum) - (in[labels[i]] - mx);
    }
    result.loss = loss / static_cast<double>(batch);

    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (size_t i = 0; i < batch; ++i) {
        double* g = result.grad.row(i);
        for (size_t j = 0; j < logits.cols; ++j) g[j] *= inv_batch;
        g[labels[i]] -= inv_batch;
    }
    ensure_finite(result.grad, "cross_entropy grad");
    if (!std::isfinite(result.loss)) throw Error("cross_entropy: non-finite loss");
    return result;
}

Tensor2 relu(const Tensor2& a) {
    Tensor2 out(a.rows, a.cols);
    for (size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] > 0.0 ? a.data[i] : 0.0;
    return out;
}

Tensor2 relu_backward(const Tensor2& input, const Tensor2& upstream) {
    if (!input.same_shape(upstream)) throw DimensionError("relu_backward: shape mismatch");
    Tensor2 out(input.rows, input.cols);
    for (size_t i = 0; i < input.size(); ++i)
        out.data[i] = input.data[i] > 0.0 ? upstream.data[i] : 0.0;
    return out;
}

double cosine_lr(const SgdCosineConfig& cfg, size_t step) {
    if (step >= cfg.total_steps) return cfg.lr_min;
    if (step == 0) return cfg.lr_max;
    const double phase = M_PI * static_cast<double>(step) / static_cast<double>(cfg.total_steps);
    return cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) * (1.0 + std::cos(phase));
}

void sgd_step(std::span<Param* const> params, const SgdCosineConfig& cfg, size_t step) {
    const double lr = cosine_lr(cfg, step);
    for (Param* p : params) {
        for (size_t i = 0; i < p->value.size(); ++i) {
            p->vel.data[i] = cfg.momentum * p->vel.data[i] + p->grad.data[i];
            p->value.data[i] -= lr * p->vel.data[i];
        }
    }
}

GradCheckReport finite_diff_check(const std::function<double()>& f,
                                  std::span<const std::pair<std::string, Param*>> params,
                                  double h) {
    GradCheckReport report;
    for (const auto& [name, p] : params) {
        GradCheckEntry entry;
        entry.name = name;
        for (size_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value.data[i];
            p->value.data[i] = saved + h;
            const double fp = f();
            p->value.data[i] = saved - h;
            const double fm = f();
            p->value.data[i] = saved;

            const double numeric = (fp - fm) / (2.0 * h);
            const double analytic = p->grad.data[i];
            const double denom = std::max(std::abs(analytic), std::abs(numeric));
            const double err = denom < 1e-8 ? std::abs(analytic - numeric)
                                            : std::abs(analytic - numeric) / denom;
            if (err >= entry.max_rel_err) {
                entry.max_rel_err = err;
                entry.worst_index = i;
                entry.analytic = analytic;
                entry.numeric = numeric;
            }
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace coknow
