#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace mdlab {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

// Dense 4x4 complex matrix, row-major. Small enough that everything stays by value.
struct Mat4 {
  std::array<cplx, 16> a{};

  cplx& operator()(int r, int c) { return a[4 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[4 * r + c]; }

  static Mat4 zero() { return Mat4{}; }
  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat4 operator+(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  Mat4 operator-(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }
  Mat4 operator*(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const cplx v = (*this)(i, k);
        if (v == cplx{}) continue;
        for (int j = 0; j < 4; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }
  Mat4 operator*(cplx s) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] * s;
    return r;
  }
  Mat4 operator-() const { return (*this) * cplx{-1.0, 0.0}; }

  Mat4 adjoint() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

inline Mat4 operator*(cplx s, const Mat4& m) { return m * s; }
inline Mat4 operator*(double s, const Mat4& m) { return m * cplx{s, 0.0}; }

// Spinor: the C^4-valued pointwise unknown.
struct Spinor {
  std::array<cplx, 4> c{};

  cplx& operator[](int i) { return c[i]; }
  const cplx& operator[](int i) const { return c[i]; }

  Spinor operator+(const Spinor& o) const {
    Spinor r;
    for (int i = 0; i < 4; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Spinor operator-(const Spinor& o) const {
    Spinor r;
    for (int i = 0; i < 4; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Spinor operator*(cplx s) const {
    Spinor r;
    for (int i = 0; i < 4; ++i) r.c[i] = c[i] * s;
    return r;
  }
  Spinor operator-() const { return (*this) * cplx{-1.0, 0.0}; }

  double norm2() const {
    double s = 0.0;
    for (const auto& v : c) s += std::norm(v);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
};

inline Spinor operator*(cplx s, const Spinor& p) { return p * s; }
inline Spinor operator*(double s, const Spinor& p) { return p * cplx{s, 0.0}; }

inline Spinor operator*(const Mat4& m, const Spinor& p) {
  Spinor r;
  for (int i = 0; i < 4; ++i) {
    cplx s{};
    for (int j = 0; j < 4; ++j) s += m(i, j) * p[j];
    r[i] = s;
  }
  return r;
}

// <a,b> = b^dagger a, the convention used throughout.
inline cplx dot(const Spinor& a, const Spinor& b) {
  cplx s{};
  for (int i = 0; i < 4; ++i) s += std::conj(b[i]) * a[i];
  return s;
}

struct Mat2 {
  std::array<cplx, 4> a{};
  cplx& operator()(int r, int c) { return a[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[2 * r + c]; }
};

}  // namespace mdlab
