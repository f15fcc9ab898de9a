// Compiled with -mavx2 -mno-fma. Only reached after the dispatcher confirms
// AVX2 support at runtime.

#include <immintrin.h>

#include "limid/kernels.hpp"

namespace limid::kernels::avx2 {
namespace {

inline __m128i load_index(const std::uint32_t* index) {
  return _mm_loadu_si128(reinterpret_cast<const __m128i*>(index));
}

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void gather(const double* table, const std::uint32_t* index, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, _mm256_i32gather_pd(table, load_index(index + k), 8));
  }
  for (; k < n; ++k) out[k] = table[index[k]];
}

void multiply(double* acc, const double* factor, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(acc + k, _mm256_mul_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(factor + k)));
  }
  for (; k < n; ++k) acc[k] *= factor[k];
}

void add(double* acc, const double* term, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(term + k)));
  }
  for (; k < n; ++k) acc[k] += term[k];
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

Sums masked_gather_sum(const double* a, const double* b, const std::uint32_t* index, const std::int32_t* key,
                       std::int32_t target, std::size_t n) {
  const __m128i wanted = _mm_set1_epi32(target);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc_a = zero;
  __m256d acc_b = zero;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i idx = load_index(index + k);
    const __m128i keys = _mm_i32gather_epi32(key, idx, 4);
    const __m256d mask = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(keys, wanted)));
    acc_a = _mm256_add_pd(acc_a, _mm256_mask_i32gather_pd(zero, a, idx, mask, 8));
    acc_b = _mm256_add_pd(acc_b, _mm256_mask_i32gather_pd(zero, b, idx, mask, 8));
  }
  Sums s{horizontal_sum(acc_a), horizontal_sum(acc_b)};
  for (; k < n; ++k) {
    const std::uint32_t i = index[k];
    if (key[i] == target) {
      s.first += a[i];
      s.second += b[i];
    }
  }
  return s;
}

}  // namespace

const Table kTable{&gather, &multiply, &add, &dot, &masked_gather_sum};

}  // namespace limid::kernels::avx2
