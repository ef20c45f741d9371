#pragma once

// Dense inner-loop kernels. Every kernel has a portable scalar reference in
// `kernels::scalar` and, on x86-64, an AVX2+FMA variant in `kernels::avx2`.
// The unqualified entry points dispatch once, at first use, to the widest
// variant the running CPU supports.

#include <cstddef>
#include <span>
#include <string_view>

namespace mixclust::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

// Best ISA supported by this CPU and build.
Isa detected_isa() noexcept;

// ISA the dispatching entry points currently use. Starts at detected_isa()
// unless the MIXCLUST_ISA environment variable is set to "scalar".
Isa active_isa() noexcept;

// Forces the dispatch target. Requesting an unsupported ISA falls back to
// scalar. Not thread-safe with respect to concurrent kernel calls.
void set_active_isa(Isa isa) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double sum(std::span<const double> a) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MIXCLUST_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace mixclust::kernels
