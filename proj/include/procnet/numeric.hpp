#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace procnet::numeric {

struct RootResult {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection on [lo, hi]; requires f(lo) and f(hi) of opposite sign (or one
/// of them zero). Runs until the bracket cannot shrink any further in double
/// precision, so the result is the sign-change point to the last ulp.
template <typename F>
RootResult bisect(F&& f, double lo, double hi, int max_iterations = 400) {
  double f_lo = f(lo);
  RootResult out{lo, lo, hi, 0};
  if (f_lo == 0.0) return out;
  if (f(hi) == 0.0) {
    out.root = hi;
    return out;
  }
  for (; out.iterations < max_iterations; ++out.iterations) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.root = lo + 0.5 * (hi - lo);
  return out;
}

struct MinimumResult {
  double x = 0.0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi], stopped
/// once the bracket is narrower than `tolerance`.
template <typename F>
MinimumResult golden_section(F&& f, double lo, double hi, double tolerance, int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  int iterations = 0;
  while (hi - lo > tolerance && iterations < max_iterations) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++iterations;
  }
  MinimumResult out;
  out.lo = lo;
  out.hi = hi;
  out.iterations = iterations;
  if (fc < fd) {
    out.x = c;
    out.value = fc;
  } else {
    out.x = d;
    out.value = fd;
  }
  return out;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// n points from lo to hi inclusive, geometrically spaced (lo, hi > 0).
inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace procnet::numeric
