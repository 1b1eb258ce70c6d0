#pragma once

#include <cstdlib>
#include <mutex>

#include <cblas.h>

namespace mfdiff {

namespace detail {

// OpenBLAS mis-detects some virtualized CPUs and falls back to slow generic
// kernels even when AVX-512 is available. Pin the kernel family once, before
// the first BLAS call, unless the user already chose one.
inline void blas_init_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
#if defined(__x86_64__) && defined(__GNUC__)
    if (std::getenv("OPENBLAS_CORETYPE") == nullptr && __builtin_cpu_supports("avx512f") &&
        __builtin_cpu_supports("avx512bw") && __builtin_cpu_supports("avx512vl")) {
      ::setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
    }
#endif
  });
}

}  // namespace detail

// C(M x N) = alpha * op(A) * op(B) + beta * C, row-major, contiguous leading dims.
template <class Real>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, Real alpha, const Real* a, const Real* b,
          Real beta, Real* c) {
  const int lda = trans_a ? m : k;
  const int ldb = trans_b ? k : n;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Real acc = 0;
      for (int p = 0; p < k; ++p) {
        const Real av = trans_a ? a[static_cast<std::size_t>(p) * lda + i] : a[static_cast<std::size_t>(i) * lda + p];
        const Real bv = trans_b ? b[static_cast<std::size_t>(j) * ldb + p] : b[static_cast<std::size_t>(p) * ldb + j];
        acc += av * bv;
      }
      Real& out = c[static_cast<std::size_t>(i) * n + j];
      out = alpha * acc + (beta == Real(0) ? Real(0) : beta * out);
    }
}

template <>
inline void gemm<float>(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
                        const float* b, float beta, float* c) {
  detail::blas_init_once();
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans, m,
              n, k, alpha, a, trans_a ? m : k, b, trans_b ? k : n, beta, c, n);
}

template <>
inline void gemm<double>(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
                         const double* b, double beta, double* c) {
  detail::blas_init_once();
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans, m,
              n, k, alpha, a, trans_a ? m : k, b, trans_b ? k : n, beta, c, n);
}

}  // namespace mfdiff
