#pragma once

#include <cmath>
#include <cstddef>

// Dense row-major kernels shared by the forward and backward passes. Loop
// order is fixed so results do not depend on anything but the inputs.

namespace medner::detail {

/// y[rows, out] = x[rows, in] * w[in, out] + b[out]; `b` may be null.
template <class T>
void linear(const T* x, std::size_t rows, std::size_t in, const T* w, const T* b, std::size_t out, T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    T* yr = y + r * out;
    for (std::size_t o = 0; o < out; ++o) yr[o] = b ? b[o] : T(0);
    const T* xr = x + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      const T xv = xr[i];
      const T* wi = w + i * out;
      for (std::size_t o = 0; o < out; ++o) yr[o] += xv * wi[o];
    }
  }
}

/// Accumulates gradients of y = x w + b: dx += dy w^T, dw += x^T dy, db += sum(dy).
/// Any of dx, dw, db may be null.
template <class T>
void linear_backward(const T* x, std::size_t rows, std::size_t in, const T* w, std::size_t out, const T* dy,
                     T* dx, T* dw, T* db) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* dyr = dy + r * out;
    const T* xr = x + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      const T* wi = w + i * out;
      if (dx) {
        T acc = 0;
        for (std::size_t o = 0; o < out; ++o) acc += dyr[o] * wi[o];
        dx[r * in + i] += acc;
      }
      if (dw) {
        const T xv = xr[i];
        T* dwi = dw + i * out;
        for (std::size_t o = 0; o < out; ++o) dwi[o] += xv * dyr[o];
      }
    }
    if (db) {
      for (std::size_t o = 0; o < out; ++o) db[o] += dyr[o];
    }
  }
}

/// Row-wise layer norm. Writes normalized values to `hat`, 1/sqrt(var+eps)
/// to `rstd`, and g*hat+b to `y`.
template <class T>
void layer_norm(const T* x, std::size_t rows, std::size_t d, const T* g, const T* b, double eps, T* hat, T* rstd,
                T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x + r * d;
    double mean = 0;
    for (std::size_t i = 0; i < d; ++i) mean += xr[i];
    mean /= static_cast<double>(d);
    double var = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double c = xr[i] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[r] = static_cast<T>(rs);
    for (std::size_t i = 0; i < d; ++i) {
      const T h = static_cast<T>((xr[i] - mean) * rs);
      hat[r * d + i] = h;
      y[r * d + i] = g[i] * h + b[i];
    }
  }
}

/// Accumulates dx, dg, db for a layer norm given its saved `hat` and `rstd`.
template <class T>
void layer_norm_backward(const T* dy, const T* hat, const T* rstd, const T* g, std::size_t rows, std::size_t d,
                         T* dx, T* dg, T* db) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* dyr = dy + r * d;
    const T* hr = hat + r * d;
    double mean_dhat = 0;
    double mean_dhat_hat = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double dh = static_cast<double>(dyr[i]) * g[i];
      mean_dhat += dh;
      mean_dhat_hat += dh * hr[i];
      dg[i] += dyr[i] * hr[i];
      db[i] += dyr[i];
    }
    mean_dhat /= static_cast<double>(d);
    mean_dhat_hat /= static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double dh = static_cast<double>(dyr[i]) * g[i];
      dx[r * d + i] += static_cast<T>(rstd[r] * (dh - mean_dhat - hr[i] * mean_dhat_hat));
    }
  }
}

}  // namespace medner::detail
