#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "glwalk/rng.hpp"
#include "glwalk/types.hpp"

// Streaming single-pass moment accumulators (Welford) with deterministic
// pairwise merging, plus the fixed-partition parallel driver.  Merging in
// partition order makes results a function of (seed, samples, partitions)
// only, independent of thread scheduling.

namespace glwalk {

namespace detail {
inline double abs2(double x) { return x * x; }
inline double abs2(const std::complex<double>& x) { return std::norm(x); }
inline double prod_re(double a, double b) { return a * b; }
inline double prod_re(const std::complex<double>& a, const std::complex<double>& b) {
  return std::real(std::conj(a) * b);
}
}  // namespace detail

template <typename T>
class Welford {
 public:
  void push(const T& x) {
    ++n_;
    T delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += detail::prod_re(delta, x - mean_);
  }

  // Chan's parallel update; order of merges is fixed by the caller.
  void merge(const Welford& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    T delta = o.mean_ - mean_;
    mean_ += delta * (nb / (na + nb));
    m2_ += o.m2_ + detail::abs2(delta) * (na * nb / (na + nb));
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  T mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

  Estimate<T> estimate() const {
    Estimate<T> e;
    e.mean = mean_;
    e.samples = n_;
    e.std_error = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    return e;
  }

 private:
  T mean_{};
  double m2_ = 0.0;
  std::int64_t n_ = 0;
};

// Per-entry Welford over fixed-size vectors of reals.
class VectorWelford {
 public:
  explicit VectorWelford(int dim = 0) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

  void push(const Vector& x) {
    ++n_;
    Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta.cwiseProduct(x - mean_);
  }

  void merge(const VectorWelford& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    Vector delta = o.mean_ - mean_;
    mean_ += delta * (nb / (na + nb));
    m2_ += o.m2_ + delta.cwiseAbs2() * (na * nb / (na + nb));
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  const Vector& mean() const { return mean_; }
  Vector variance() const {
    return n_ > 1 ? Vector(m2_ / static_cast<double>(n_ - 1)) : Vector(Vector::Zero(mean_.size()));
  }
  Vector std_error() const {
    if (n_ < 2) return Vector::Zero(mean_.size());
    return (m2_ / (static_cast<double>(n_ - 1) * static_cast<double>(n_))).cwiseSqrt();
  }

 private:
  Vector mean_, m2_;
  std::int64_t n_ = 0;
};

// Chunk sizes for a fixed partition of `total` samples; partition layout is
// part of the deterministic contract.
inline std::vector<std::int64_t> partition_sizes(std::int64_t total, int partitions) {
  if (partitions < 1) partitions = 1;
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(partitions));
  std::int64_t base = total / partitions, rem = total % partitions;
  for (int p = 0; p < partitions; ++p) sizes[static_cast<std::size_t>(p)] = base + (p < rem ? 1 : 0);
  return sizes;
}

// Run `partitions` independent chunks (one thread each when partitions > 1)
// and hand back per-chunk states in partition order.  Worker p receives
// derive(seed, p) and its chunk size.
template <typename State, typename Worker>
std::vector<State> run_partitioned(std::int64_t samples, int partitions, Seed seed,
                                   Worker&& worker) {
  auto sizes = partition_sizes(samples, partitions);
  std::vector<State> states(sizes.size());
  if (sizes.size() == 1) {
    states[0] = worker(0, sizes[0], derive(seed, 0));
    return states;
  }
  std::vector<std::thread> pool;
  pool.reserve(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    pool.emplace_back([&, p] {
      try {
        states[p] = worker(static_cast<int>(p), sizes[p], derive(seed, static_cast<std::uint64_t>(p)));
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return states;
}

}  // namespace glwalk
