#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "coknow/tensor.hpp"

namespace coknow {

Tensor2 matmul(const Tensor2& a, const Tensor2& b);
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b); // a * b^T
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b); // a^T * b

struct NormalizedRows {
    Tensor2 values;
    std::vector<uint8_t> degenerate; // per row, 1 = norm < eps, passed through unchanged

    bool any_degenerate() const;
};

NormalizedRows l2_normalize_rows(const Tensor2& a, double eps = 1e-12);

// row-wise softmax with max subtraction
Tensor2 softmax_rows(const Tensor2& logits);

struct CrossEntropyResult {
    double loss = 0.0; // mean over rows of -log softmax[label]
    Tensor2 grad;      // (softmax - onehot) / batch
};

CrossEntropyResult cross_entropy(const Tensor2& logits, std::span<const size_t> labels);

Tensor2 relu(const Tensor2& a);
// pass-through where the forward input was > 0, zero elsewhere (including at 0)
Tensor2 relu_backward(const Tensor2& input, const Tensor2& upstream);

struct SgdCosineConfig {
    double lr_max = 0.002;
    double lr_min = 0.0;
    size_t total_steps = 1;
    double momentum = 0.9;
};

// lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total)) / 2,
// exact at both endpoints, clamped to lr_min past total_steps
double cosine_lr(const SgdCosineConfig& cfg, size_t step);

// v <- momentum * v + g;  value <- value - lr(step) * v.  Grads untouched.
void sgd_step(std::span<Param* const> params, const SgdCosineConfig& cfg, size_t step);

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;

    bool pass(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of the gradients already stored in each param
// against a deterministic scalar function of the param values. Values are
// perturbed in place and restored.
GradCheckReport finite_diff_check(const std::function<double()>& f,
                                  std::span<const std::pair<std::string, Param*>> params,
                                  double h = 1e-5);

} // namespace coknow
