#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "error.hpp"

namespace vacant {

inline constexpr double pi = std::numbers::pi;

// Neumaier-compensated accumulator in extended precision.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Richardson extrapolation on a sequence sampled at h_k = 1/n_k with an error
// expansion sum_j c_j h^{p_j}. Solves the square system exactly, so the n_k
// need not be geometric. Returns the h -> 0 intercept.
inline double richardson(std::span<const double> ns, std::span<const double> values,
                         std::span<const double> exponents) {
  const std::size_t m = ns.size();
  require(values.size() == m && exponents.size() + 1 >= m && m >= 1,
          "richardson: need one more sample than exponents used");
  std::vector<long double> a(m * m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i * m] = 1.0L;
    for (std::size_t j = 1; j < m; ++j)
      a[i * m + j] = std::pow(static_cast<long double>(ns[i]), -exponents[j - 1]);
    b[i] = values[i];
  }
  // Gaussian elimination with partial pivoting; m is tiny.
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::fabs(a[r * m + c]) > std::fabs(a[piv * m + c])) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < m; ++j) std::swap(a[c * m + j], a[piv * m + j]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < m; ++r) {
      const long double f = a[r * m + c] / a[c * m + c];
      for (std::size_t j = c; j < m; ++j) a[r * m + j] -= f * a[c * m + j];
      b[r] -= f * b[c];
    }
  }
  std::vector<long double> x(m);
  for (std::size_t r = m; r-- > 0;) {
    long double s = b[r];
    for (std::size_t j = r + 1; j < m; ++j) s -= a[r * m + j] * x[j];
    x[r] = s / a[r * m + r];
  }
  return static_cast<double>(x[0]);
}

// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "log_log_slope: need >= 2 points");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline unsigned default_width() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs fn(i) for i in [0, count) on `width` threads pulling indices from a
// shared counter. The first exception thrown is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned width, Fn&& fn) {
  if (width <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned n = std::min<std::size_t>(width, count);
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vacant
