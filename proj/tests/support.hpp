#pragma once
// Glue between library states and the dense oracle vectors.

#include "bsc/fockspace.hpp"
#include "oracles.hpp"

namespace support {

inline oracle::Vec to_vec(const bsc::QuantumState& s) {
  oracle::Vec v(static_cast<Eigen::Index>(s.dimension()));
  for (std::size_t i = 0; i < s.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

inline bsc::QuantumState from_vec(const bsc::HilbertLayout& layout, const oracle::Vec& v) {
  bsc::QuantumState s(layout);
  for (std::size_t i = 0; i < s.dimension(); ++i) s[i] = v(static_cast<Eigen::Index>(i));
  return s;
}

inline double max_diff(const oracle::Vec& a, const oracle::Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Random normalized state with the top Fock level empty, so JC steps
/// never hit the truncation edge.
inline bsc::QuantumState random_state(const bsc::HilbertLayout& layout, std::mt19937_64& rng) {
  oracle::Vec v = oracle::random_state(static_cast<int>(layout.dimension()), rng);
  const std::size_t top = layout.fock_cutoff() * layout.atom_states();
  for (std::size_t i = top; i < layout.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = 0.0;
  v /= v.norm();
  return from_vec(layout, v);
}

}  // namespace support
