#include "limid/kernels.hpp"

namespace limid::kernels::scalar {
namespace {

void gather(const double* table, const std::uint32_t* index, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = table[index[k]];
}

void multiply(double* acc, const double* factor, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] *= factor[k];
}

void add(double* acc, const double* term, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] += term[k];
}

// Strictly sequential: this is the reference order for expected utilities.
double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

Sums masked_gather_sum(const double* a, const double* b, const std::uint32_t* index, const std::int32_t* key,
                       std::int32_t target, std::size_t n) {
  Sums s;
  for (std::size_t k = 0; k < n; ++k) {
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

}  // namespace limid::kernels::scalar
