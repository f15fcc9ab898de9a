#include <atomic>
#include <cstdlib>
#include <string>

#include "limid/error.hpp"
#include "limid/kernels.hpp"

namespace limid::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(LIMID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("LIMID_KERNELS")) {
    const std::string_view choice(env);
    if (choice == "scalar") return Isa::Scalar;
    if (choice == "avx2" && cpu_has_avx2()) return Isa::Avx2;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const Table*>& active_table() {
  static std::atomic<const Table*> table{&table_for(initial_isa())};
  return table;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorCode::DimensionMismatch, std::string("kernel operand sizes differ in ") + what);
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) noexcept {
  return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2());
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (supported(Isa::Avx2)) out.push_back(Isa::Avx2);
  return out;
}

const Table& table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return scalar::kTable;
    case Isa::Avx2:
#if defined(LIMID_HAVE_AVX2)
      if (cpu_has_avx2()) return avx2::kTable;
#endif
      break;
  }
  throw Error(ErrorCode::InvalidParams, "kernel ISA " + std::string(to_string(isa)) + " is not available");
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  const Table& table = table_for(isa);
  active_table().store(&table, std::memory_order_relaxed);
  active().store(isa, std::memory_order_relaxed);
}

void gather(std::span<const double> table, std::span<const std::uint32_t> index, std::span<double> out) {
  check_same_size(index.size(), out.size(), "gather");
  active_table().load(std::memory_order_relaxed)->gather(table.data(), index.data(), out.data(), out.size());
}

void multiply(std::span<double> acc, std::span<const double> factor) {
  check_same_size(acc.size(), factor.size(), "multiply");
  active_table().load(std::memory_order_relaxed)->multiply(acc.data(), factor.data(), acc.size());
}

void add(std::span<double> acc, std::span<const double> term) {
  check_same_size(acc.size(), term.size(), "add");
  active_table().load(std::memory_order_relaxed)->add(acc.data(), term.data(), acc.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "dot");
  return active_table().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

Sums masked_gather_sum(std::span<const double> a, std::span<const double> b, std::span<const std::uint32_t> index,
                       std::span<const std::int32_t> key, std::int32_t target) {
  check_same_size(a.size(), b.size(), "masked_gather_sum");
  check_same_size(a.size(), key.size(), "masked_gather_sum");
  return active_table().load(std::memory_order_relaxed)
      ->masked_gather_sum(a.data(), b.data(), index.data(), key.data(), target, index.size());
}

}  // namespace limid::kernels
