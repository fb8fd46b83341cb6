#pragma once

#include <cstdint>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "glwalk/accum.hpp"
#include "glwalk/rng.hpp"
#include "glwalk/types.hpp"

// Haar sampling on the orthogonal/unitary group and the generic Monte Carlo
// expectation driver.  Sampling: Gaussian (Ginibre) matrix, QR, then the Q
// factor is phase-corrected by the signs/phases of R's diagonal so that the
// distribution is exactly Haar and not biased by the QR sign convention.

namespace glwalk {

RealMatrix sample_haar_real(int n, Rng& rng);
ComplexMatrix sample_haar_complex(int n, Rng& rng);

template <typename Scalar>
Matrix<Scalar> sample_haar(int n, Rng& rng) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return sample_haar_real(n, rng);
  } else {
    return sample_haar_complex(n, rng);
  }
}

// E[f(k)] over Haar k, one estimate per component of f.  The integrand maps
// a unitary to a real vector; each partition runs an independent derived
// stream and partial accumulators merge in partition order, so the result is
// a pure function of (seed, samples, partitions).
template <typename Scalar, typename F>
std::vector<MCEstimate> haar_expect(F&& f, int n, std::int64_t samples, Seed seed,
                                    int partitions = 1) {
  struct Chunk {
    std::vector<Welford<double>> acc;
  };
  auto states = run_partitioned<Chunk>(
      samples, partitions, seed, [&](int part, std::int64_t count, Seed s) {
        Chunk c;
        Rng rng = make_rng(s);
        for (std::int64_t i = 0; i < count; ++i) {
          Matrix<Scalar> k = sample_haar<Scalar>(n, rng);
          Vector v = f(k);
          if (c.acc.empty()) c.acc.resize(static_cast<std::size_t>(v.size()));
          for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (!std::isfinite(v[j])) {
              std::ostringstream msg;
              msg << "haar_expect: non-finite integrand component " << j << " at sample " << i
                  << " of partition " << part << " (n=" << n << ")";
              throw NonFiniteIntegrand(msg.str());
            }
            c.acc[static_cast<std::size_t>(j)].push(v[j]);
          }
        }
        return c;
      });
  std::vector<Welford<double>> total;
  for (const auto& st : states) {
    if (total.empty()) total.resize(st.acc.size());
    for (std::size_t j = 0; j < st.acc.size(); ++j) total[j].merge(st.acc[j]);
  }
  std::vector<MCEstimate> out(total.size());
  for (std::size_t j = 0; j < total.size(); ++j) out[j] = total[j].estimate();
  return out;
}

}  // namespace glwalk
