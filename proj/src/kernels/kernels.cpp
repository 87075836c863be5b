#include "fuchs/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace fuchs::kernels {

namespace scalar_backend {

void add(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernels::add(a[i], b[i]);
}
void sub(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernels::sub(a[i], b[i]);
}
void mul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernels::mul(a[i], b[i]);
}
void div(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernels::div(a[i], b[i]);
}
void neg(const cplx* a, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernels::neg(a[i]);
}

}  // namespace scalar_backend

#ifdef FUCHS_HAVE_AVX2
namespace avx2_backend {
void add(const cplx*, const cplx*, cplx*, std::size_t);
void sub(const cplx*, const cplx*, cplx*, std::size_t);
void mul(const cplx*, const cplx*, cplx*, std::size_t);
void div(const cplx*, const cplx*, cplx*, std::size_t);
void neg(const cplx*, cplx*, std::size_t);
}  // namespace avx2_backend
#endif

namespace {

constexpr Table kScalar{scalar_backend::add, scalar_backend::sub, scalar_backend::mul,
                        scalar_backend::div, scalar_backend::neg};
#ifdef FUCHS_HAVE_AVX2
constexpr Table kAvx2{avx2_backend::add, avx2_backend::sub, avx2_backend::mul, avx2_backend::div,
                      avx2_backend::neg};
#endif

std::atomic<const Table*>& active_table() {
  static std::atomic<const Table*> t{&table(best_backend())};
  return t;
}

}  // namespace

const char* to_string(Backend b) { return b == Backend::scalar ? "scalar" : "avx2"; }

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(FUCHS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend best_backend() {
  return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

const Table& table(Backend b) {
#ifdef FUCHS_HAVE_AVX2
  if (b == Backend::avx2) return kAvx2;
#endif
  if (b != Backend::scalar) throw std::invalid_argument("kernel backend not built");
  return kScalar;
}

Backend active_backend() {
#ifdef FUCHS_HAVE_AVX2
  if (active_table().load() == &kAvx2) return Backend::avx2;
#endif
  return Backend::scalar;
}

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument(std::string("kernel backend not supported: ") + to_string(b));
  }
  active_table().store(&table(b));
}

void add(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  active_table().load()->add(a.data(), b.data(), out.data(), out.size());
}
void sub(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  active_table().load()->sub(a.data(), b.data(), out.data(), out.size());
}
void mul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  active_table().load()->mul(a.data(), b.data(), out.data(), out.size());
}
void div(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  active_table().load()->div(a.data(), b.data(), out.data(), out.size());
}
void neg(std::span<const cplx> a, std::span<cplx> out) {
  active_table().load()->neg(a.data(), out.data(), out.size());
}

}  // namespace fuchs::kernels
