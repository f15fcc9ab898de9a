#pragma once

// Data-parallel inner loops used by path tables and the native solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime from cpuid. The element-wise kernels (gather,
// multiply, add) are bit-identical across variants. The reductions (dot,
// masked_gather_sum) associate differently per variant and agree to rounding.
//
// The LIMID_KERNELS environment variable ("scalar" or "avx2") overrides the
// initial selection; set_isa() overrides it programmatically.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace limid::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

bool supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Throws InvalidParams when the ISA is not supported on this host.
void set_isa(Isa isa);
std::vector<Isa> supported_isas();

struct Sums {
  double first = 0.0;
  double second = 0.0;
};

/// out[k] = table[index[k]]
void gather(std::span<const double> table, std::span<const std::uint32_t> index, std::span<double> out);
/// acc[k] *= factor[k]
void multiply(std::span<double> acc, std::span<const double> factor);
/// acc[k] += term[k]
void add(std::span<double> acc, std::span<const double> term);
/// sum_k a[k] * b[k]
double dot(std::span<const double> a, std::span<const double> b);
/// Sums a[i] and b[i] over i = index[k] for which key[i] == target.
Sums masked_gather_sum(std::span<const double> a, std::span<const double> b, std::span<const std::uint32_t> index,
                       std::span<const std::int32_t> key, std::int32_t target);

// Direct access to one variant, for equivalence tests and benchmarks.
struct Table {
  void (*gather)(const double* table, const std::uint32_t* index, double* out, std::size_t n);
  void (*multiply)(double* acc, const double* factor, std::size_t n);
  void (*add)(double* acc, const double* term, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  Sums (*masked_gather_sum)(const double* a, const double* b, const std::uint32_t* index, const std::int32_t* key,
                            std::int32_t target, std::size_t n);
};

/// Throws InvalidParams when the ISA is not supported on this host.
const Table& table_for(Isa isa);

namespace scalar {
extern const Table kTable;
}
#if defined(LIMID_HAVE_AVX2)
namespace avx2 {
extern const Table kTable;
}
#endif

}  // namespace limid::kernels
