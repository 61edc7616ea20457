#include "coknow/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coknow::kernels {

namespace {

std::atomic<Mode> g_mode{Mode::Auto};

// rough flop counts below which threading costs more than it saves
constexpr size_t kMatmulWorkThreshold = size_t{1} << 18;
constexpr size_t kRowwiseWorkThreshold = size_t{1} << 15;

bool go_parallel(size_t work, size_t threshold) {
#ifdef _OPENMP
    switch (g_mode.load(std::memory_order_relaxed)) {
    case Mode::Serial: return false;
    case Mode::Parallel: return true;
    case Mode::Auto: return work >= threshold;
    }
    return false;
#else
    (void)work;
    (void)threshold;
    return false;
#endif
}

void softmax_row(const double* in, double* out, size_t n) {
    double mx = in[0];
    for (size_t j = 1; j < n; ++j) mx = std::max(mx, in[j]);
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        out[j] = std::exp(in[j] - mx);
        sum += out[j];
    }
    const double inv = 1.0 / sum;
    for (size_t j = 0; j < n; ++j) out[j] *= inv;
}

uint8_t normalize_row(const double* in, double* out, size_t n, double eps) {
    double sq = 0.0;
    for (size_t j = 0; j < n; ++j) sq += in[j] * in[j];
    const double norm = std::sqrt(sq);
    if (norm < eps) {
        for (size_t j = 0; j < n; ++j) out[j] = in[j];
        return 1;
    }
    const double inv = 1.0 / norm;
    for (size_t j = 0; j < n; ++j) out[j] = in[j] * inv;
    return 0;
}

void matmul_row(const Tensor2& a, const Tensor2& b, Tensor2& out, size_t i) {
    double* dst = out.row(i);
    for (size_t j = 0; j < out.cols; ++j) dst[j] = 0.0;
    const double* arow = a.row(i);
    for (size_t k = 0; k < a.cols; ++k) {
        const double aik = arow[k];
        const double* brow = b.row(k);
        for (size_t j = 0; j < out.cols; ++j) dst[j] += aik * brow[j];
    }
}

void matmul_nt_row(const Tensor2& a, const Tensor2& b, Tensor2& out, size_t i) {
    const double* arow = a.row(i);
    double* dst = out.row(i);
    for (size_t j = 0; j < out.cols; ++j) {
        const double* brow = b.row(j);
        double acc = 0.0;
        for (size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
        dst[j] = acc;
    }
}

void matmul_tn_row(const Tensor2& a, const Tensor2& b, Tensor2& out, size_t i) {
    double* dst = out.row(i);
    for (size_t j = 0; j < out.cols; ++j) {
        double acc = 0.0;
        for (size_t l = 0; l < a.rows; ++l) acc += a.at(l, i) * b.at(l, j);
        dst[j] = acc;
    }
}

} // namespace

void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }
Mode current_mode() { return g_mode.load(std::memory_order_relaxed); }

namespace serial {

void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    for (size_t i = 0; i < a.rows; ++i) matmul_row(a, b, out, i);
}

void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    for (size_t i = 0; i < a.rows; ++i) matmul_nt_row(a, b, out, i);
}

void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    for (size_t i = 0; i < out.rows; ++i) matmul_tn_row(a, b, out, i);
}

void softmax_rows(const Tensor2& logits, Tensor2& out) {
    for (size_t i = 0; i < logits.rows; ++i) softmax_row(logits.row(i), out.row(i), logits.cols);
}

void l2_normalize_rows(const Tensor2& in, double eps, Tensor2& out, std::vector<uint8_t>& degenerate) {
    for (size_t i = 0; i < in.rows; ++i)
        degenerate[i] = normalize_row(in.row(i), out.row(i), in.cols, eps);
}

} // namespace serial

void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    if (!go_parallel(a.rows * a.cols * b.cols, kMatmulWorkThreshold)) {
        serial::matmul(a, b, out);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.rows); ++i)
        matmul_row(a, b, out, static_cast<size_t>(i));
#endif
}

void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    if (!go_parallel(a.rows * a.cols * b.rows, kMatmulWorkThreshold)) {
        serial::matmul_nt(a, b, out);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.rows); ++i)
        matmul_nt_row(a, b, out, static_cast<size_t>(i));
#endif
}

void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& out) {
    if (!go_parallel(a.rows * a.cols * b.cols, kMatmulWorkThreshold)) {
        serial::matmul_tn(a, b, out);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(out.rows); ++i)
        matmul_tn_row(a, b, out, static_cast<size_t>(i));
#endif
}

void softmax_rows(const Tensor2& logits, Tensor2& out) {
    if (!go_parallel(logits.size(), kRowwiseWorkThreshold)) {
        serial::softmax_rows(logits, out);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(logits.rows); ++i)
        softmax_row(logits.row(static_cast<size_t>(i)), out.row(static_cast<size_t>(i)), logits.cols);
#endif
}

void l2_normalize_rows(const Tensor2& in, double eps, Tensor2& out, std::vector<uint8_t>& degenerate) {
    if (!go_parallel(in.size(), kRowwiseWorkThreshold)) {
        serial::l2_normalize_rows(in, eps, out, degenerate);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(in.rows); ++i)
        degenerate[static_cast<size_t>(i)] =
            normalize_row(in.row(static_cast<size_t>(i)), out.row(static_cast<size_t>(i)), in.cols, eps);
#endif
}

} // namespace coknow::kernels
