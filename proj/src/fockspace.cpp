#include "bsc/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsc {

HilbertLayout::HilbertLayout(std::size_t fock_cutoff, std::size_t atom_count)
    : cutoff_(fock_cutoff), atoms_(atom_count) {
  if (fock_cutoff < 1) throw LayoutError("fock_cutoff must be >= 1");
  if (atom_count > 16) throw LayoutError("atom_count above 16 is not supported by a dense state");
}

void HilbertLayout::check_atom(std::size_t atom) const {
  if (atom >= atoms_) {
    throw LayoutError("atom index " + std::to_string(atom) + " out of range for " +
                      std::to_string(atoms_) + " atoms");
  }
}

std::size_t HilbertLayout::index_of(std::size_t photons, const std::vector<Level>& spins) const {
  if (photons > cutoff_) {
    throw CutoffError("photon number " + std::to_string(photons) + " exceeds cutoff " +
                      std::to_string(cutoff_));
  }
  if (spins.size() != atoms_) {
    throw LayoutError("expected " + std::to_string(atoms_) + " atomic levels, got " +
                      std::to_string(spins.size()));
  }
  std::size_t idx = photons << atoms_;
  for (std::size_t j = 0; j < spins.size(); ++j) {
    if (spins[j] == Level::up) idx |= atom_bit(j);
  }
  return idx;
}

BasisLabel HilbertLayout::label_of(std::size_t index) const {
  if (index >= dimension()) throw LayoutError("flat index out of range");
  BasisLabel label{photons_of(index), std::vector<Level>(atoms_)};
  for (std::size_t j = 0; j < atoms_; ++j) label.spins[j] = level_of(index, j);
  return label;
}

bool Subsystems::contains_atom(std::size_t a) const {
  return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
}

QuantumState::QuantumState(HilbertLayout layout)
    : layout_(layout), amps_(layout.dimension(), cplx{0.0, 0.0}) {}

QuantumState::QuantumState(HilbertLayout layout, std::vector<cplx> amplitudes)
    : layout_(layout), amps_(std::move(amplitudes)) {
  if (amps_.size() != layout_.dimension()) {
    throw LayoutError("amplitude vector length does not match layout dimension");
  }
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void QuantumState::normalize() {
  const double n = norm();
  if (n == 0.0) throw Error("cannot normalize the zero vector");
  for (auto& a : amps_) a /= n;
}

double QuantumState::top_level_population() const {
  const std::size_t stride = layout_.atom_states();
  const std::size_t base = layout_.fock_cutoff() * stride;
  double p = 0.0;
  for (std::size_t s = 0; s < stride; ++s) p += std::norm(amps_[base + s]);
  return p;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : rho_(std::move(entries)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw LayoutError("density matrix must be square and non-empty");
  }
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& vec) {
  Eigen::Map<const Eigen::VectorXcd> v(vec.data(), static_cast<Eigen::Index>(vec.size()));
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  // Symmetrize first so round-off asymmetry does not leak into the spectrum.
  const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityMatrix::expectation(const std::vector<cplx>& v) const {
  if (v.size() != dimension()) throw LayoutError("vector length does not match density matrix");
  Eigen::Map<const Eigen::VectorXcd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return (x.adjoint() * rho_ * x)(0, 0).real();
}

QuantumState make_basis_state(const HilbertLayout& layout, std::size_t photons,
                              const std::vector<Level>& spins) {
  QuantumState s(layout);
  s[layout.index_of(photons, spins)] = 1.0;
  return s;
}

QuantumState product_state(const HilbertLayout& layout, const std::vector<cplx>& cavity,
                           const std::vector<Level>& spins) {
  if (cavity.size() > layout.fock_cutoff() + 1) {
    throw CutoffError("cavity vector longer than the retained Fock space");
  }
  QuantumState s(layout);
  for (std::size_t n = 0; n < cavity.size(); ++n) s[layout.index_of(n, spins)] = cavity[n];
  return s;
}

cplx inner_product(const QuantumState& a, const QuantumState& b) {
  if (!(a.layout() == b.layout())) throw LayoutError("inner product of mismatched layouts");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  return std::norm(inner_product(a, b));
}

DensityMatrix reduced_density(const QuantumState& state, const Subsystems& keep) {
  if (keep.empty()) throw LayoutError("reduced_density needs at least one kept subsystem");
  const HilbertLayout& L = state.layout();
  for (auto a : keep.atoms) L.check_atom(a);

  const std::size_t kept_atoms = keep.atoms.size();
  const std::size_t kept_dim =
      (keep.cavity ? L.fock_cutoff() + 1 : 1) * (std::size_t{1} << kept_atoms);

  std::vector<std::size_t> traced;
  for (std::size_t a = 0; a < L.atom_count(); ++a) {
    if (!keep.contains_atom(a)) traced.push_back(a);
  }

  // Split every flat index into (kept index, traced index).
  const std::size_t dim = L.dimension();
  std::vector<std::size_t> kidx(dim), tidx(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t k = keep.cavity ? (L.photons_of(i) << kept_atoms) : 0;
    for (std::size_t j = 0; j < kept_atoms; ++j) {
      if (L.level_of(i, keep.atoms[j]) == Level::up) k |= std::size_t{1} << j;
    }
    std::size_t t = keep.cavity ? 0 : L.photons_of(i) << traced.size();
    for (std::size_t j = 0; j < traced.size(); ++j) {
      if (L.level_of(i, traced[j]) == Level::up) t |= std::size_t{1} << j;
    }
    kidx[i] = k;
    tidx[i] = t;
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim),
                                                static_cast<Eigen::Index>(kept_dim));
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < dim; ++i) {
    if (amps[i] == cplx{}) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (tidx[i] != tidx[j]) continue;
      rho(static_cast<Eigen::Index>(kidx[i]), static_cast<Eigen::Index>(kidx[j])) +=
          amps[i] * std::conj(amps[j]);
    }
  }
  return DensityMatrix(std::move(rho));
}

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return rho.entries().cwiseAbs2().sum();
}

double mean_photon_number(const QuantumState& state) {
  double n = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    n += static_cast<double>(state.layout().photons_of(i)) * std::norm(state[i]);
  }
  return n;
}

double excited_population(const QuantumState& state, std::size_t atom) {
  state.layout().check_atom(atom);
  double p = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (state.layout().level_of(i, atom) == Level::up) p += std::norm(state[i]);
  }
  return p;
}

}  // namespace bsc
