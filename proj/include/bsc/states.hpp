#pragma once

#include <vector>

#include "bsc/fockspace.hpp"

namespace bsc {

/// Parameters of the generalized binomial state |N, p, phi>.
struct BinomialSpec {
  std::size_t N = 2;
  double p = 0.5;  // single-photon probability, [0, 1]
  double phi = 0.0;

  void validate() const;
  /// The orthogonal partner |N, 1-p, pi+phi>.
  BinomialSpec partner() const;
};

/// Normalized superposition [|N,p,phi> + eta |N,1-p,pi+phi>] / sqrt(1+|eta|^2).
struct CatSpec {
  BinomialSpec base;
  cplx eta{1.0, 0.0};

  double normalization() const;
};

/// Cavity amplitudes c_n = sqrt(C(N,n) p^n (1-p)^(N-n)) e^{i n phi}, padded
/// with zeros up to `length`. Uses log-space binomials and treats 0^0 as 1.
std::vector<cplx> binomial_amplitudes(const BinomialSpec& spec, std::size_t length);
std::vector<cplx> cat_amplitudes(const CatSpec& spec, std::size_t length);

/// Binomial or cat state placed on the cavity, every atom in `spins`
/// (all down when omitted).
QuantumState binomial_state(const HilbertLayout& layout, const BinomialSpec& spec,
                            std::vector<Level> spins = {});
QuantumState cat_state(const HilbertLayout& layout, const CatSpec& spec,
                       std::vector<Level> spins = {});

/// Closed form [sqrt((1-pa)(1-pb)) + sqrt(pa pb) e^{i(phib-phia)}]^N.
cplx binomial_overlap(const BinomialSpec& a, const BinomialSpec& b);

/// <N,p,phi|rho_cavity|N,p,phi>; the state may carry atoms, which are traced out.
double component_projection(const QuantumState& state, const BinomialSpec& spec);
double component_projection(const DensityMatrix& cavity_rho, const BinomialSpec& spec);

/// Cavity fidelity <target|rho_cavity|target> for a cat target.
double cavity_fidelity(const QuantumState& state, const CatSpec& target);

/// Recovers eta = <partner|psi> / <base|psi> from the dominant atomic sector
/// of a (near) product state.
cplx fit_cat_weight(const QuantumState& state, const BinomialSpec& base);

}  // namespace bsc
