#include "cadret/nn/ops.hpp"

#include <cmath>
#include <string>

#include "cadret/core/error.hpp"
#include "cadret/kernels/kernels.hpp"

namespace cadret::nn {

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorKind::Shape, std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
}

template <typename T>
void require_matrix(const char* op, const Tensor<T>& t) {
  require(t.rank() == 2, ErrorKind::Shape, std::string(op) + ": expected a matrix, got shape " + to_string(t.shape()));
}

template <typename T>
Tape<T>& same_tape(std::initializer_list<Var<T>> vars) {
  Tape<T>* tape = vars.begin()->tape;
  require(tape != nullptr, ErrorKind::Contract, "variable without a tape");
  for (const Var<T>& v : vars) tape->check_owner(v);
  return *tape;
}

// C[m,n] += A[m,k] B[k,n]
template <typename T>
void gemm_nn(const T* A, const T* B, T* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const T a = A[i * k + p];
      if (a != T(0)) kernels::axpy<T>(a, B + p * n, C + i * n, n);
    }
  }
}

// C[m,n] += A[m,k] B[n,k]^T
template <typename T>
void gemm_nt(const T* A, const T* B, T* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] += kernels::dot<T>(A + i * k, B + j * k, k);
  }
}

// C[k,n] += A[m,k]^T B[m,n]
template <typename T>
void gemm_tn(const T* A, const T* B, T* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t p = 0; p < k; ++p) {
      const T a = A[r * k + p];
      if (a != T(0)) kernels::axpy<T>(a, B + r * n, C + p * n, n);
    }
  }
}

template <typename T>
void accumulate(Tensor<T>& dst, const Tensor<T>& src) {
  kernels::axpy<T>(T(1), src.data(), dst.data(), dst.size());
}

// out[0..n) = sum of rows [lo, hi), midpoint-split tree.
template <typename T>
void pairwise_rows(const T* a, std::size_t lo, std::size_t hi, std::size_t n, T* out) {
  if (hi - lo == 1) {
    std::copy(a + lo * n, a + (lo + 1) * n, out);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<T> right(n);
  pairwise_rows(a, lo, mid, n, out);
  pairwise_rows(a, mid, hi, n, right.data());
  kernels::axpy<T>(T(1), right.data(), out, n);
}

template <typename T, typename F, typename D>
Var<T> unary(Var<T> a, F f, D df) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& x = a.value();
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return tape.record(std::move(y), {a}, [a_id = a.id, df](Tape<T>& t, std::uint32_t self) {
    if (!t.requires_grad(a_id)) return;
    const Tensor<T>& g = *t.grad_if_any(self);
    const Tensor<T>& x = t.value(a_id);
    const Tensor<T>& y = t.value(self);
    Tensor<T>& dx = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * df(x[i], y[i]);
  });
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape({a, b});
  const Tensor<T>& A = a.value();
  const Tensor<T>& B = b.value();
  require_matrix("matmul", A);
  require_matrix("matmul", B);
  if (A.dim(1) != B.dim(0)) shape_error("matmul", A.shape(), B.shape());
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  Tensor<T> C({m, n});
  gemm_nn(A.data(), B.data(), C.data(), m, k, n);
  return tape.record(std::move(C), {a, b}, [a_id = a.id, b_id = b.id, m, k, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    if (t.requires_grad(a_id)) gemm_nt(g.data(), t.value(b_id).data(), t.grad_buffer(a_id).data(), m, n, k);
    if (t.requires_grad(b_id)) gemm_tn(t.value(a_id).data(), g.data(), t.grad_buffer(b_id).data(), m, k, n);
  });
}

template <typename T>
Var<T> matmul_nt(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape({a, b});
  const Tensor<T>& A = a.value();
  const Tensor<T>& B = b.value();
  require_matrix("matmul_nt", A);
  require_matrix("matmul_nt", B);
  if (A.dim(1) != B.dim(1)) shape_error("matmul_nt", A.shape(), B.shape());
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(0);
  Tensor<T> C({m, n});
  gemm_nt(A.data(), B.data(), C.data(), m, k, n);
  return tape.record(std::move(C), {a, b}, [a_id = a.id, b_id = b.id, m, k, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    // dA = G B, dB = G^T A
    if (t.requires_grad(a_id)) gemm_nn(g.data(), t.value(b_id).data(), t.grad_buffer(a_id).data(), m, n, k);
    if (t.requires_grad(b_id)) gemm_tn(g.data(), t.value(a_id).data(), t.grad_buffer(b_id).data(), m, n, k);
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape({a, b});
  const Tensor<T>& A = a.value();
  const Tensor<T>& B = b.value();
  if (A.shape() != B.shape()) shape_error("add", A.shape(), B.shape());
  Tensor<T> C = A;
  accumulate(C, B);
  return tape.record(std::move(C), {a, b}, [a_id = a.id, b_id = b.id](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    if (t.requires_grad(a_id)) accumulate(t.grad_buffer(a_id), g);
    if (t.requires_grad(b_id)) accumulate(t.grad_buffer(b_id), g);
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape({a, b});
  const Tensor<T>& A = a.value();
  const Tensor<T>& B = b.value();
  if (A.shape() != B.shape()) shape_error("sub", A.shape(), B.shape());
  Tensor<T> C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] -= B[i];
  return tape.record(std::move(C), {a, b}, [a_id = a.id, b_id = b.id](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    if (t.requires_grad(a_id)) accumulate(t.grad_buffer(a_id), g);
    if (t.requires_grad(b_id)) kernels::axpy<T>(T(-1), g.data(), t.grad_buffer(b_id).data(), g.size());
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  Tape<T>& tape = same_tape({a, b});
  const Tensor<T>& A = a.value();
  const Tensor<T>& B = b.value();
  if (A.shape() != B.shape()) shape_error("mul", A.shape(), B.shape());
  Tensor<T> C(A.shape());
  kernels::mul<T>(A.data(), B.data(), C.data(), C.size());
  return tape.record(std::move(C), {a, b}, [a_id = a.id, b_id = b.id](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    std::vector<T> tmp(g.size());
    if (t.requires_grad(a_id)) {
      kernels::mul<T>(g.data(), t.value(b_id).data(), tmp.data(), g.size());
      kernels::axpy<T>(T(1), tmp.data(), t.grad_buffer(a_id).data(), g.size());
    }
    if (t.requires_grad(b_id)) {
      kernels::mul<T>(g.data(), t.value(a_id).data(), tmp.data(), g.size());
      kernels::axpy<T>(T(1), tmp.data(), t.grad_buffer(b_id).data(), g.size());
    }
  });
}

template <typename T>
Var<T> add_bias(Var<T> a, Var<T> bias) {
  Tape<T>& tape = same_tape({a, bias});
  const Tensor<T>& A = a.value();
  const Tensor<T>& b = bias.value();
  require_matrix("add_bias", A);
  if (b.rank() != 1 || b.dim(0) != A.dim(1)) shape_error("add_bias", A.shape(), b.shape());
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor<T> C = A;
  for (std::size_t i = 0; i < m; ++i) kernels::axpy<T>(T(1), b.data(), C.data() + i * n, n);
  return tape.record(std::move(C), {a, bias}, [a_id = a.id, b_id = bias.id, m, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    if (t.requires_grad(a_id)) accumulate(t.grad_buffer(a_id), g);
    if (t.requires_grad(b_id)) {
      Tensor<T>& db = t.grad_buffer(b_id);
      for (std::size_t i = 0; i < m; ++i) kernels::axpy<T>(T(1), g.data() + i * n, db.data(), n);
    }
  });
}

template <typename T>
Var<T> scale(Var<T> a, T factor) {
  Tape<T>& tape = same_tape({a});
  Tensor<T> C(a.value().shape());
  kernels::axpy<T>(factor, a.value().data(), C.data(), C.size());
  return tape.record(std::move(C), {a}, [a_id = a.id, factor](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    kernels::axpy<T>(factor, g.data(), t.grad_buffer(a_id).data(), g.size());
  });
}

template <typename T>
Var<T> add_scalar(Var<T> a, T value) {
  return unary(a, [value](T x) { return x + value; }, [](T, T) { return T(1); });
}

template <typename T>
Var<T> relu(Var<T> a) {
  return unary(a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  return unary(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> exp(Var<T> a) {
  return unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Var<T> log(Var<T> a) {
  for (T x : a.value().values()) {
    require(x > T(0), ErrorKind::Numeric, "log of non-positive value " + std::to_string(x));
  }
  return unary(a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Var<T> concat(const std::vector<Var<T>>& parts, int axis) {
  require(!parts.empty(), ErrorKind::Contract, "concat of no tensors");
  require(axis == 0 || axis == 1, ErrorKind::Contract, "concat axis must be 0 or 1");
  Tape<T>& tape = *parts.front().tape;
  for (const Var<T>& p : parts) {
    tape.check_owner(p);
    require_matrix("concat", p.value());
  }
  const Shape& first = parts.front().value().shape();
  std::vector<std::size_t> extent;
  std::size_t total = 0;
  for (const Var<T>& p : parts) {
    const Shape& s = p.value().shape();
    if (s[1 - axis] != first[1 - axis]) shape_error("concat", first, s);
    extent.push_back(s[axis]);
    total += s[axis];
  }
  const std::size_t rows = axis == 0 ? total : first[0];
  const std::size_t cols = axis == 0 ? first[1] : total;
  Tensor<T> C({rows, cols});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& P = parts[k].value();
    if (axis == 0) {
      std::copy(P.data(), P.data() + P.size(), C.data() + offset * cols);
    } else {
      for (std::size_t i = 0; i < rows; ++i) {
        std::copy(P.data() + i * extent[k], P.data() + (i + 1) * extent[k], C.data() + i * cols + offset);
      }
    }
    offset += extent[k];
  }
  std::vector<std::uint32_t> ids;
  for (const Var<T>& p : parts) ids.push_back(p.id);
  return tape.record(std::move(C), parts, [ids, extent, axis, rows, cols](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) {
        Tensor<T>& d = t.grad_buffer(ids[k]);
        if (axis == 0) {
          kernels::axpy<T>(T(1), g.data() + offset * cols, d.data(), d.size());
        } else {
          for (std::size_t i = 0; i < rows; ++i) {
            kernels::axpy<T>(T(1), g.data() + i * cols + offset, d.data() + i * extent[k], extent[k]);
          }
        }
      }
      offset += extent[k];
    }
  });
}

template <typename T>
Var<T> sum(Var<T> a, int axis) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& A = a.value();
  require_matrix("sum", A);
  require(axis == 0 || axis == 1, ErrorKind::Contract, "sum axis must be 0 or 1");
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor<T> C(axis == 0 ? Shape{1, n} : Shape{m, 1});
  if (axis == 0) {
    if (m > 0) pairwise_rows(A.data(), 0, m, n, C.data());
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      T s = T(0);
      for (std::size_t j = 0; j < n; ++j) s += A[i * n + j];
      C[i] = s;
    }
  }
  return tape.record(std::move(C), {a}, [a_id = a.id, axis, m, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    Tensor<T>& d = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] += axis == 0 ? g[j] : g[i];
    }
  });
}

template <typename T>
Var<T> sum_all(Var<T> a) {
  Tape<T>& tape = same_tape({a});
  T s = T(0);
  for (T x : a.value().values()) s += x;
  return tape.record(Tensor<T>({1}, {s}), {a}, [a_id = a.id](Tape<T>& t, std::uint32_t self) {
    const T g = (*t.grad_if_any(self))[0];
    Tensor<T>& d = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g;
  });
}

template <typename T>
Var<T> mean_all(Var<T> a) {
  const std::size_t n = a.value().size();
  require(n > 0, ErrorKind::Contract, "mean of an empty tensor");
  return scale(sum_all(a), T(1) / static_cast<T>(n));
}

template <typename T>
Var<T> l2_norm(Var<T> a) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& A = a.value();
  require_matrix("l2_norm", A);
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor<T> N({m, 1});
  for (std::size_t i = 0; i < m; ++i) N[i] = std::sqrt(kernels::dot<T>(A.data() + i * n, A.data() + i * n, n));
  return tape.record(std::move(N), {a}, [a_id = a.id, m, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    const Tensor<T>& A = t.value(a_id);
    const Tensor<T>& N = t.value(self);
    Tensor<T>& d = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < m; ++i) {
      if (N[i] > T(0)) kernels::axpy<T>(g[i] / N[i], A.data() + i * n, d.data() + i * n, n);
    }
  });
}

template <typename T>
Var<T> normalize_rows(Var<T> a) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& A = a.value();
  require_matrix("normalize_rows", A);
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor<T> Y(A.shape());
  std::vector<T> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    norms[i] = std::sqrt(kernels::dot<T>(A.data() + i * n, A.data() + i * n, n));
    require(norms[i] > T(0) && std::isfinite(norms[i]), ErrorKind::Numeric,
            "cannot normalize row " + std::to_string(i) + ": norm is " + std::to_string(norms[i]));
    kernels::axpy<T>(T(1) / norms[i], A.data() + i * n, Y.data() + i * n, n);
  }
  return tape.record(std::move(Y), {a}, [a_id = a.id, norms, m, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    const Tensor<T>& Y = t.value(self);
    Tensor<T>& d = t.grad_buffer(a_id);
    // dx = (g - y (y . g)) / |x|
    for (std::size_t i = 0; i < m; ++i) {
      const T* gi = g.data() + i * n;
      const T* yi = Y.data() + i * n;
      const T yg = kernels::dot<T>(yi, gi, n);
      const T inv = T(1) / norms[i];
      kernels::axpy<T>(inv, gi, d.data() + i * n, n);
      kernels::axpy<T>(-yg * inv, yi, d.data() + i * n, n);
    }
  });
}

template <typename T>
Var<T> cosine_similarity(Var<T> a, Var<T> b) {
  require_matrix("cosine_similarity", a.value());
  require_matrix("cosine_similarity", b.value());
  if (a.value().dim(1) != b.value().dim(1)) shape_error("cosine_similarity", a.value().shape(), b.value().shape());
  return matmul_nt(normalize_rows(a), normalize_rows(b));
}

namespace {

struct ConvGeom {
  std::size_t B, H, W, C, O, kh, kw;
  std::size_t patch() const { return kh * kw * C; }
  std::size_t pixels() const { return H * W; }
};

// cols[H*W, kh*kw*C] for image `img`; out-of-bounds taps are zero.
template <typename T>
void im2col(const T* x, const ConvGeom& g, std::size_t img, T* cols) {
  const std::size_t ph = g.kh / 2, pw = g.kw / 2;
  const T* base = x + img * g.H * g.W * g.C;
  std::fill(cols, cols + g.pixels() * g.patch(), T(0));
  for (std::size_t y = 0; y < g.H; ++y) {
    for (std::size_t xx = 0; xx < g.W; ++xx) {
      T* row = cols + (y * g.W + xx) * g.patch();
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - static_cast<std::ptrdiff_t>(ph);
        if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(g.H)) continue;
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - static_cast<std::ptrdiff_t>(pw);
          if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(g.W)) continue;
          const T* src = base + (static_cast<std::size_t>(sy) * g.W + static_cast<std::size_t>(sx)) * g.C;
          std::copy(src, src + g.C, row + (ky * g.kw + kx) * g.C);
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeom& g, std::size_t img, T* dx) {
  const std::size_t ph = g.kh / 2, pw = g.kw / 2;
  T* base = dx + img * g.H * g.W * g.C;
  for (std::size_t y = 0; y < g.H; ++y) {
    for (std::size_t xx = 0; xx < g.W; ++xx) {
      const T* row = cols + (y * g.W + xx) * g.patch();
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - static_cast<std::ptrdiff_t>(ph);
        if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(g.H)) continue;
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - static_cast<std::ptrdiff_t>(pw);
          if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(g.W)) continue;
          T* dst = base + (static_cast<std::size_t>(sy) * g.W + static_cast<std::size_t>(sx)) * g.C;
          kernels::axpy<T>(T(1), row + (ky * g.kw + kx) * g.C, dst, g.C);
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Var<T> conv2d(Var<T> x, Var<T> w, Var<T> b, std::size_t kh, std::size_t kw) {
  Tape<T>& tape = same_tape({x, w, b});
  const Tensor<T>& X = x.value();
  const Tensor<T>& Wt = w.value();
  const Tensor<T>& Bt = b.value();
  require(kh % 2 == 1 && kw % 2 == 1, ErrorKind::Contract, "conv2d kernel sizes must be odd");
  require(X.rank() == 4, ErrorKind::Shape, "conv2d: expected input [B,H,W,C], got " + to_string(X.shape()));
  const ConvGeom g{X.dim(0), X.dim(1), X.dim(2), X.dim(3), Wt.rank() == 2 ? Wt.dim(1) : 0, kh, kw};
  if (Wt.rank() != 2 || Wt.dim(0) != g.patch()) shape_error("conv2d", X.shape(), Wt.shape());
  if (Bt.rank() != 1 || Bt.dim(0) != g.O) shape_error("conv2d", Wt.shape(), Bt.shape());
  Tensor<T> Y({g.B, g.H, g.W, g.O});
  std::vector<T> cols(g.pixels() * g.patch());
  for (std::size_t img = 0; img < g.B; ++img) {
    im2col(X.data(), g, img, cols.data());
    T* out = Y.data() + img * g.pixels() * g.O;
    for (std::size_t r = 0; r < g.pixels(); ++r) std::copy(Bt.data(), Bt.data() + g.O, out + r * g.O);
    gemm_nn(cols.data(), Wt.data(), out, g.pixels(), g.patch(), g.O);
  }
  return tape.record(std::move(Y), {x, w, b},
                     [x_id = x.id, w_id = w.id, b_id = b.id, g](Tape<T>& t, std::uint32_t self) {
                       const Tensor<T>& G = *t.grad_if_any(self);
                       const Tensor<T>& X = t.value(x_id);
                       const Tensor<T>& Wt = t.value(w_id);
                       std::vector<T> cols(g.pixels() * g.patch());
                       for (std::size_t img = 0; img < g.B; ++img) {
                         const T* gout = G.data() + img * g.pixels() * g.O;
                         if (t.requires_grad(w_id)) {
                           im2col(X.data(), g, img, cols.data());
                           gemm_tn(cols.data(), gout, t.grad_buffer(w_id).data(), g.pixels(), g.patch(), g.O);
                         }
                         if (t.requires_grad(b_id)) {
                           Tensor<T>& db = t.grad_buffer(b_id);
                           for (std::size_t r = 0; r < g.pixels(); ++r) {
                             kernels::axpy<T>(T(1), gout + r * g.O, db.data(), g.O);
                           }
                         }
                         if (t.requires_grad(x_id)) {
                           std::fill(cols.begin(), cols.end(), T(0));
                           gemm_nt(gout, Wt.data(), cols.data(), g.pixels(), g.O, g.patch());
                           col2im_add(cols.data(), g, img, t.grad_buffer(x_id).data());
                         }
                       }
                     });
}

template <typename T>
Var<T> conv1d(Var<T> x, Var<T> w, Var<T> b, std::size_t k) {
  const Shape& s = x.value().shape();
  require(s.size() == 3, ErrorKind::Shape, "conv1d: expected input [B,L,C], got " + to_string(s));
  Var<T> y = conv2d(reshape(x, {s[0], 1, s[1], s[2]}), w, b, 1, k);
  const Shape& ys = y.value().shape();
  return reshape(y, {ys[0], ys[2], ys[3]});
}

template <typename T>
Var<T> adaptive_avg_pool2d(Var<T> x, std::size_t oh, std::size_t ow) {
  Tape<T>& tape = same_tape({x});
  const Tensor<T>& X = x.value();
  require(X.rank() == 4, ErrorKind::Shape, "adaptive_avg_pool2d: expected [B,H,W,C], got " + to_string(X.shape()));
  require(oh > 0 && ow > 0, ErrorKind::Contract, "adaptive_avg_pool2d: output size must be positive");
  const std::size_t B = X.dim(0), H = X.dim(1), W = X.dim(2), C = X.dim(3);
  require(H > 0 && W > 0, ErrorKind::Shape, "adaptive_avg_pool2d: empty spatial extent " + to_string(X.shape()));
  auto bin = [](std::size_t i, std::size_t in, std::size_t out) {
    return std::pair<std::size_t, std::size_t>{i * in / out, ((i + 1) * in + out - 1) / out};
  };
  Tensor<T> Y({B, oh, ow, C});
  for (std::size_t n = 0; n < B; ++n) {
    for (std::size_t i = 0; i < oh; ++i) {
      const auto [y0, y1] = bin(i, H, oh);
      for (std::size_t j = 0; j < ow; ++j) {
        const auto [x0, x1] = bin(j, W, ow);
        T* out = Y.data() + ((n * oh + i) * ow + j) * C;
        for (std::size_t yy = y0; yy < y1; ++yy) {
          for (std::size_t xx = x0; xx < x1; ++xx) {
            kernels::axpy<T>(T(1), X.data() + ((n * H + yy) * W + xx) * C, out, C);
          }
        }
        const T inv = T(1) / static_cast<T>((y1 - y0) * (x1 - x0));
        for (std::size_t c = 0; c < C; ++c) out[c] *= inv;
      }
    }
  }
  return tape.record(std::move(Y), {x}, [x_id = x.id, B, H, W, C, oh, ow, bin](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& G = *t.grad_if_any(self);
    Tensor<T>& d = t.grad_buffer(x_id);
    for (std::size_t n = 0; n < B; ++n) {
      for (std::size_t i = 0; i < oh; ++i) {
        const auto [y0, y1] = bin(i, H, oh);
        for (std::size_t j = 0; j < ow; ++j) {
          const auto [x0, x1] = bin(j, W, ow);
          const T inv = T(1) / static_cast<T>((y1 - y0) * (x1 - x0));
          const T* g = G.data() + ((n * oh + i) * ow + j) * C;
          for (std::size_t yy = y0; yy < y1; ++yy) {
            for (std::size_t xx = x0; xx < x1; ++xx) {
              kernels::axpy<T>(inv, g, d.data() + ((n * H + yy) * W + xx) * C, C);
            }
          }
        }
      }
    }
  });
}

template <typename T>
Var<T> adaptive_avg_pool1d(Var<T> x, std::size_t ol) {
  const Shape& s = x.value().shape();
  require(s.size() == 3, ErrorKind::Shape, "adaptive_avg_pool1d: expected [B,L,C], got " + to_string(s));
  Var<T> y = adaptive_avg_pool2d(reshape(x, {s[0], 1, s[1], s[2]}), 1, ol);
  return reshape(y, {s[0], ol, s[2]});
}

template <typename T>
Var<T> reshape(Var<T> a, Shape shape) {
  Tape<T>& tape = same_tape({a});
  if (numel(shape) != a.value().size()) shape_error("reshape", a.value().shape(), shape);
  Tensor<T> Y(std::move(shape), a.value().values());
  return tape.record(std::move(Y), {a}, [a_id = a.id](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    kernels::axpy<T>(T(1), g.data(), t.grad_buffer(a_id).data(), g.size());
  });
}

template <typename T>
Var<T> gather_rows(Var<T> a, std::span<const std::uint32_t> idx) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& A = a.value();
  require_matrix("gather_rows", A);
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor<T> Y({idx.size(), n});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < m, ErrorKind::Contract,
            "gather_rows: index " + std::to_string(idx[i]) + " outside " + std::to_string(m) + " rows");
    std::copy(A.data() + idx[i] * n, A.data() + (idx[i] + 1) * n, Y.data() + i * n);
  }
  std::vector<std::uint32_t> saved(idx.begin(), idx.end());
  return tape.record(std::move(Y), {a}, [a_id = a.id, saved, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    Tensor<T>& d = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < saved.size(); ++i) kernels::axpy<T>(T(1), g.data() + i * n, d.data() + saved[i] * n, n);
  });
}

template <typename T>
Var<T> scatter_add_rows(Var<T> a, std::span<const std::uint32_t> idx, std::size_t rows) {
  Tape<T>& tape = same_tape({a});
  const Tensor<T>& A = a.value();
  require_matrix("scatter_add_rows", A);
  if (A.dim(0) != idx.size()) shape_error("scatter_add_rows", A.shape(), Shape{idx.size()});
  const std::size_t n = A.dim(1);
  Tensor<T> Y({rows, n});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < rows, ErrorKind::Contract,
            "scatter_add_rows: index " + std::to_string(idx[i]) + " outside " + std::to_string(rows) + " rows");
    kernels::axpy<T>(T(1), A.data() + i * n, Y.data() + idx[i] * n, n);
  }
  std::vector<std::uint32_t> saved(idx.begin(), idx.end());
  return tape.record(std::move(Y), {a}, [a_id = a.id, saved, n](Tape<T>& t, std::uint32_t self) {
    const Tensor<T>& g = *t.grad_if_any(self);
    Tensor<T>& d = t.grad_buffer(a_id);
    for (std::size_t i = 0; i < saved.size(); ++i) kernels::axpy<T>(T(1), g.data() + saved[i] * n, d.data() + i * n, n);
  });
}

#define CADRET_INSTANTIATE_OPS(T)                                                                  \
  template Var<T> matmul(Var<T>, Var<T>);                                                          \
  template Var<T> matmul_nt(Var<T>, Var<T>);                                                       \
  template Var<T> add(Var<T>, Var<T>);                                                             \
  template Var<T> sub(Var<T>, Var<T>);                                                             \
  template Var<T> mul(Var<T>, Var<T>);                                                             \
  template Var<T> add_bias(Var<T>, Var<T>);                                                        \
  template Var<T> scale(Var<T>, T);                                                                \
  template Var<T> add_scalar(Var<T>, T);                                                           \
  template Var<T> relu(Var<T>);                                                                    \
  template Var<T> sigmoid(Var<T>);                                                                 \
  template Var<T> exp(Var<T>);                                                                     \
  template Var<T> log(Var<T>);                                                                     \
  template Var<T> concat(const std::vector<Var<T>>&, int);                                         \
  template Var<T> sum(Var<T>, int);                                                                \
  template Var<T> sum_all(Var<T>);                                                                 \
  template Var<T> mean_all(Var<T>);                                                                \
  template Var<T> l2_norm(Var<T>);                                                                 \
  template Var<T> normalize_rows(Var<T>);                                                          \
  template Var<T> cosine_similarity(Var<T>, Var<T>);                                               \
  template Var<T> conv2d(Var<T>, Var<T>, Var<T>, std::size_t, std::size_t);                        \
  template Var<T> conv1d(Var<T>, Var<T>, Var<T>, std::size_t);                                     \
  template Var<T> adaptive_avg_pool2d(Var<T>, std::size_t, std::size_t);                          \
  template Var<T> adaptive_avg_pool1d(Var<T>, std::size_t);                                        \
  template Var<T> reshape(Var<T>, Shape);                                                          \
  template Var<T> gather_rows(Var<T>, std::span<const std::uint32_t>);                             \
  template Var<T> scatter_add_rows(Var<T>, std::span<const std::uint32_t>, std::size_t);

CADRET_INSTANTIATE_OPS(float)
CADRET_INSTANTIATE_OPS(double)

}  // namespace cadret::nn
