#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "coknow/error.hpp"

namespace coknow {

// Dense row-major matrix of doubles. Row vectors are 1 x n tensors.
struct Tensor2 {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> init);

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }

    double* row(size_t r) { return data.data() + r * cols; }
    const double* row(size_t r) const { return data.data() + r * cols; }

    std::span<double> row_span(size_t r) { return {row(r), cols}; }
    std::span<const double> row_span(size_t r) const { return {row(r), cols}; }

    void set_row(size_t r, std::span<const double> values);
    std::vector<double> row_copy(size_t r) const { return {row(r), row(r) + cols}; }

    size_t size() const { return data.size(); }
    bool same_shape(const Tensor2& other) const { return rows == other.rows && cols == other.cols; }
    bool operator==(const Tensor2& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }
};

// Throws if any entry is NaN or infinite. Every public numerics op calls
// this on its result; matrices here are small enough that the scan is noise.
void ensure_finite(const Tensor2& t, const char* op);
void ensure_finite(std::span<const double> v, const char* op);

// Trainable tensor: value plus accumulated gradient plus SGD velocity.
struct Param {
    Tensor2 value;
    Tensor2 grad;
    Tensor2 vel;

    Param() = default;
    explicit Param(Tensor2 v)
        : value(std::move(v)),
          grad(value.rows, value.cols, 0.0),
          vel(value.rows, value.cols, 0.0) {}

    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

void zero_grads(std::span<Param* const> params);

} // namespace coknow
