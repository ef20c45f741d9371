#include <atomic>
#include <cstdlib>
#include <string_view>

#include "mixclust/kernels.hpp"

namespace mixclust::kernels {
namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  double (*sum)(const double*, std::size_t) noexcept;
  double (*squared_distance)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
};

constexpr Table kScalar{&scalar::dot, &scalar::sum, &scalar::squared_distance, &scalar::axpy};
#ifdef MIXCLUST_HAVE_AVX2_KERNELS
constexpr Table kAvx2{&avx2::dot, &avx2::sum, &avx2::squared_distance, &avx2::axpy};
#endif

bool cpu_has_avx2() noexcept {
#if defined(MIXCLUST_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("MIXCLUST_ISA"); env != nullptr && std::string_view(env) == "scalar") {
    return Isa::Scalar;
  }
  return detected_isa();
}

const Table* table_for(Isa isa) noexcept {
#ifdef MIXCLUST_HAVE_AVX2_KERNELS
  if (isa == Isa::Avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

std::atomic<const Table*>& active_table() noexcept {
  static std::atomic<const Table*> table{table_for(initial_isa())};
  return table;
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

inline const Table& T() noexcept { return *active_table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

Isa active_isa() noexcept { return active().load(); }

void set_active_isa(Isa isa) noexcept {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  active().store(isa);
  active_table().store(table_for(isa));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return T().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

double sum(std::span<const double> a) noexcept { return T().sum(a.data(), a.size()); }

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return T().squared_distance(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  T().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace mixclust::kernels
