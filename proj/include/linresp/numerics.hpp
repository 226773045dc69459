#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace linresp {

// Guard against near-parabolic data: |Lambda - 1| and |det(J - I)| must stay
// above this before any division.
inline constexpr double kEpsGuard = 1e-9;

// Compensated (Kahan) accumulator.  All trace sums run through this in a
// fixed, sorted order so results are bitwise reproducible.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum k;
  for (double x : xs) k.add(x);
  return k.value();
}

// Chunked parallel map over [0, n).  Each index writes only its own slots, so
// the result is independent of the worker count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr err;
  std::mutex err_mtx;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += nw) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mtx);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Central difference with one Richardson step: error O(h^4).
inline double richardson_derivative(const std::function<double(double)>& f,
                                    double h) {
  if (!(h > 0)) throw std::invalid_argument("richardson step must be positive");
  double d1 = (f(h) - f(-h)) / (2.0 * h);
  double d2 = (f(2.0 * h) - f(-2.0 * h)) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t npts = 0;
};

// Ordinary least squares y = slope*x + intercept with coefficient of
// determination.
inline LinearFit least_squares(std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 matched points");
  std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.npts = n;
  return fit;
}

}  // namespace linresp
