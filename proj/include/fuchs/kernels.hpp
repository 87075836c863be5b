#pragma once

// Complex arithmetic over columns of values. The scalar functions below are
// the reference: pointwise evaluation uses them directly, the scalar column
// backend loops over them, and the AVX2 backend reproduces the same operation
// order so all three agree bit for bit.

#include <complex>
#include <span>

namespace fuchs::kernels {

using cplx = std::complex<double>;

inline cplx add(cplx a, cplx b) { return {a.real() + b.real(), a.imag() + b.imag()}; }
inline cplx sub(cplx a, cplx b) { return {a.real() - b.real(), a.imag() - b.imag()}; }
// Adding +0 keeps negated zeros positive, so -1 stays on the principal side of log.
inline cplx neg(cplx a) { return {-a.real() + 0.0, -a.imag() + 0.0}; }

inline cplx mul(cplx a, cplx b) {
  const double rr = a.real() * b.real();
  const double ii = a.imag() * b.imag();
  const double ri = a.real() * b.imag();
  const double ir = a.imag() * b.real();
  return {rr - ii, ri + ir};
}

// Smith's algorithm. Caller guarantees b != 0.
inline cplx div(cplx a, cplx b) {
  const double br = b.real();
  const double bi = b.imag();
  if (std::abs(br) >= std::abs(bi)) {
    const double r = bi / br;
    const double den = br + bi * r;
    return {(a.real() + a.imag() * r) / den, (a.imag() - a.real() * r) / den};
  }
  const double r = br / bi;
  const double den = bi + br * r;
  return {(a.real() * r + a.imag()) / den, (a.imag() * r - a.real()) / den};
}

enum class Backend { scalar, avx2 };

const char* to_string(Backend b);
bool backend_supported(Backend b);
/// Best backend the running CPU supports.
Backend best_backend();
Backend active_backend();
/// Throws std::invalid_argument if the backend is not supported here.
void set_backend(Backend b);

// Column kernels on the active backend. All spans have equal length; `out`
// may alias an input.
void add(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void sub(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void mul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void div(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void neg(std::span<const cplx> a, std::span<cplx> out);

struct Table {
  void (*add)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*sub)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*mul)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*div)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*neg)(const cplx*, cplx*, std::size_t);
};

/// Direct access to one backend, for equivalence testing.
const Table& table(Backend b);

}  // namespace fuchs::kernels
