// numeric.hpp
//
// Small numeric utilities shared by all modules: compensated summation and
// a deterministic index-ordered parallel map.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gl3 {

// Neumaier (improved Kahan) summation.  For complex values the real and
// imaginary parts are compensated independently.
template <typename T>
class Accumulator;

template <>
class Accumulator<double> {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <>
class Accumulator<std::complex<double>> {
 public:
  void add(std::complex<double> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  Accumulator<double> re_, im_;
};

// Evaluates f(0..n-1) on up to `threads` workers.  Results are stored by
// index, so any reduction done by the caller in index order is independent
// of the thread count.
template <typename R>
std::vector<R> parallel_map(std::size_t n, int threads, const std::function<R(std::size_t)>& f) {
  std::vector<R> out(n);
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errs(nt);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += nt) out[i] = f(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gl3
