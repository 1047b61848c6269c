#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bsc {

using cplx = std::complex<double>;

// Tolerances shared by every module. Config files may override the
// runtime copy (see Tolerances); these are the defaults.
inline constexpr double NORM_TOL = 1e-12;
inline constexpr double FID_TOL = 1e-6;
inline constexpr double BRANCH_TOL = 1e-15;
inline constexpr double EIGEN_TOL = 1e-10;

struct Tolerances {
  double norm = NORM_TOL;
  double fidelity = FID_TOL;
  double leakage = NORM_TOL;
  double branch = BRANCH_TOL;

  bool operator==(const Tolerances&) const = default;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CutoffError : Error {
  using Error::Error;
};
struct LayoutError : Error {
  using Error::Error;
};

enum class Level : unsigned char { down = 0, up = 1 };

inline const char* to_string(Level s) { return s == Level::up ? "up" : "down"; }

/// Basis labels of one flat index: photon number plus one level per atom.
struct BasisLabel {
  std::size_t photons = 0;
  std::vector<Level> spins;

  bool operator==(const BasisLabel&) const = default;
};

/// Truncated single-mode cavity tensored with `atom_count` two-level atoms.
///
/// Flat index convention (little-endian in the atoms):
///   index = n * 2^k + sum_j s_j * 2^j,   s_j in {down=0, up=1}
/// so atom 0 is the least significant bit and the photon number is the
/// slowest-varying label.
class HilbertLayout {
 public:
  static constexpr std::size_t kDefaultCutoff = 8;

  explicit HilbertLayout(std::size_t fock_cutoff = kDefaultCutoff, std::size_t atom_count = 0);

  std::size_t fock_cutoff() const { return cutoff_; }
  std::size_t atom_count() const { return atoms_; }
  std::size_t atom_states() const { return std::size_t{1} << atoms_; }
  std::size_t dimension() const { return (cutoff_ + 1) * atom_states(); }

  std::size_t index_of(std::size_t photons, const std::vector<Level>& spins) const;
  BasisLabel label_of(std::size_t index) const;

  std::size_t photons_of(std::size_t index) const { return index >> atoms_; }
  Level level_of(std::size_t index, std::size_t atom) const {
    return ((index >> atom) & 1U) ? Level::up : Level::down;
  }
  std::size_t atom_bit(std::size_t atom) const { return std::size_t{1} << atom; }

  void check_atom(std::size_t atom) const;

  bool operator==(const HilbertLayout&) const = default;

 private:
  std::size_t cutoff_;
  std::size_t atoms_;
};

/// Pure state over a HilbertLayout. A value type: copies are deep.
class QuantumState {
 public:
  explicit QuantumState(HilbertLayout layout);
  QuantumState(HilbertLayout layout, std::vector<cplx> amplitudes);

  const HilbertLayout& layout() const { return layout_; }
  std::size_t dimension() const { return amps_.size(); }

  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::vector<cplx>& amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }
  cplx& operator[](std::size_t i) { return amps_[i]; }

  double norm() const;
  void normalize();

  /// Probability weight sitting in the top retained Fock level.
  double top_level_population() const;

 private:
  HilbertLayout layout_;
  std::vector<cplx> amps_;
};

/// Which subsystems a partial trace keeps, or a free evolution acts on.
struct Subsystems {
  bool cavity = false;
  std::vector<std::size_t> atoms;

  static Subsystems cavity_only() { return {true, {}}; }
  static Subsystems atom(std::size_t a) { return {false, {a}}; }
  bool empty() const { return !cavity && atoms.empty(); }
  bool contains_atom(std::size_t a) const;
  bool operator==(const Subsystems&) const = default;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);
  static DensityMatrix pure(const std::vector<cplx>& vec);

  std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& entries() const { return rho_; }
  cplx operator()(std::size_t r, std::size_t c) const { return rho_(r, c); }

  cplx trace() const { return rho_.trace(); }
  double hermiticity_error() const;
  Eigen::VectorXd eigenvalues() const;

  /// <v|rho|v>
  double expectation(const std::vector<cplx>& v) const;

 private:
  Eigen::MatrixXcd rho_;
};

QuantumState make_basis_state(const HilbertLayout& layout, std::size_t photons,
                              const std::vector<Level>& spins);

/// Builds a state from a cavity vector (length <= cutoff+1) with every atom
/// in the given levels.
QuantumState product_state(const HilbertLayout& layout, const std::vector<cplx>& cavity,
                           const std::vector<Level>& spins);

cplx inner_product(const QuantumState& a, const QuantumState& b);
double fidelity(const QuantumState& a, const QuantumState& b);

DensityMatrix reduced_density(const QuantumState& state, const Subsystems& keep);
double purity(const DensityMatrix& rho);

/// Expectation of the photon number a^dag a.
double mean_photon_number(const QuantumState& state);
/// Probability that `atom` is found excited.
double excited_population(const QuantumState& state, std::size_t atom);

}  // namespace bsc
