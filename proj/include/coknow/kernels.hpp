#pragma once

#include <cstdint>
#include <vector>

#include "coknow/tensor.hpp"

// Inner-loop kernels. Each one exists twice: a plain serial reference under
// kernels::serial, and an OpenMP front door that partitions work by output
// row. Every output element is produced by exactly one thread with the same
// accumulation order as the reference, so both paths are bit-identical for
// any thread count. Dispatch picks serial below a work threshold.
namespace coknow::kernels {

enum class Mode { Auto, Serial, Parallel };

void set_mode(Mode m);
Mode current_mode();

namespace serial {

// out(m,n) = a(m,k) * b(k,n)
void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out);
// out(m,n) = a(m,k) * b(n,k)^T
void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& out);
// out(m,n) = a(k,m)^T * b(k,n)
void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& out);

void softmax_rows(const Tensor2& logits, Tensor2& out);
// rows with norm < eps are copied through and flagged
void l2_normalize_rows(const Tensor2& in, double eps, Tensor2& out, std::vector<uint8_t>& degenerate);

} // namespace serial

void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out);
void matmul_nt(const Tensor2& a, const Tensor2& b, Tensor2& out);
void matmul_tn(const Tensor2& a, const Tensor2& b, Tensor2& out);
void softmax_rows(const Tensor2& logits, Tensor2& out);
void l2_normalize_rows(const Tensor2& in, double eps, Tensor2& out, std::vector<uint8_t>& degenerate);

} // namespace coknow::kernels
