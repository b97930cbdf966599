#pragma once

// Differentiable operations. Every op validates shapes (Error(Shape) naming
// both shapes), never mutates its inputs, and records a backward closure when
// an input requires grad. Tensors are row-major; "matrix" means rank 2.
//
// Reduction order is fixed: matmul accumulates over the inner index in
// ascending order, sum(axis=0) is a pairwise (midpoint-split) tree over rows,
// sum(axis=1) and sum_all run left to right.

#include <cstdint>
#include <span>
#include <vector>

#include "cadret/nn/tape.hpp"

namespace cadret::nn {

// [m,k] x [k,n] -> [m,n]
template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
// [m,k] x [n,k]^T -> [m,n]
template <typename T> Var<T> matmul_nt(Var<T> a, Var<T> b);

template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
// [m,n] + [n] broadcast over rows
template <typename T> Var<T> add_bias(Var<T> a, Var<T> bias);
template <typename T> Var<T> scale(Var<T> a, T factor);
template <typename T> Var<T> add_scalar(Var<T> a, T value);

template <typename T> Var<T> relu(Var<T> a);
template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> exp(Var<T> a);
// Error(Numeric) on non-positive input.
template <typename T> Var<T> log(Var<T> a);

// Matrices concatenated along axis 0 (rows) or 1 (columns).
template <typename T> Var<T> concat(const std::vector<Var<T>>& parts, int axis);
// Matrix reductions: axis 0 -> [1,n], axis 1 -> [m,1].
template <typename T> Var<T> sum(Var<T> a, int axis);
// Any rank -> shape [1].
template <typename T> Var<T> sum_all(Var<T> a);
template <typename T> Var<T> mean_all(Var<T> a);

// Row-wise Euclidean norm of a matrix -> [m,1].
template <typename T> Var<T> l2_norm(Var<T> a);
// Rows scaled to unit norm; Error(Numeric) naming the row for a zero row.
template <typename T> Var<T> normalize_rows(Var<T> a);
// [m,d], [n,d] -> [m,n] of cosine similarities.
template <typename T> Var<T> cosine_similarity(Var<T> a, Var<T> b);

// x [B,H,W,C], w [kh*kw*C, O] (patch-major: ky, kx, c), b [O] -> [B,H,W,O].
// Stride 1, zero "same" padding; kh and kw odd.
template <typename T> Var<T> conv2d(Var<T> x, Var<T> w, Var<T> b, std::size_t kh, std::size_t kw);
// x [B,L,C], w [k*C, O], b [O] -> [B,L,O]. Stride 1, same padding; k odd.
template <typename T> Var<T> conv1d(Var<T> x, Var<T> w, Var<T> b, std::size_t k);
// x [B,H,W,C] -> [B,oh,ow,C]; bin i spans [floor(i*H/oh), ceil((i+1)*H/oh)).
template <typename T> Var<T> adaptive_avg_pool2d(Var<T> x, std::size_t oh, std::size_t ow);
// x [B,L,C] -> [B,ol,C].
template <typename T> Var<T> adaptive_avg_pool1d(Var<T> x, std::size_t ol);

template <typename T> Var<T> reshape(Var<T> a, Shape shape);
// Rows of a matrix selected by index -> [idx.size(), n].
template <typename T> Var<T> gather_rows(Var<T> a, std::span<const std::uint32_t> idx);
// out[idx[i]] += a[i], in ascending i -> [rows, n].
template <typename T> Var<T> scatter_add_rows(Var<T> a, std::span<const std::uint32_t> idx, std::size_t rows);

}  // namespace cadret::nn
