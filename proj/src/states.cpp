#include "bsc/states.hpp"

#include <cmath>
#include <numbers>

namespace bsc {

void BinomialSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("binomial p must lie in [0, 1]");
  if (!std::isfinite(phi)) throw Error("binomial phase must be finite");
}

BinomialSpec BinomialSpec::partner() const { return {N, 1.0 - p, std::numbers::pi + phi}; }

double CatSpec::normalization() const { return 1.0 / std::sqrt(1.0 + std::norm(eta)); }

namespace {

// log of C(N,n) p^n (1-p)^(N-n); -inf for an impossible term.
double log_weight(std::size_t N, std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  const double NN = static_cast<double>(N);
  if (p == 0.0) return n == 0 ? 0.0 : -INFINITY;
  if (p == 1.0) return n == N ? 0.0 : -INFINITY;
  const double log_choose = std::lgamma(NN + 1.0) - std::lgamma(nn + 1.0) - std::lgamma(NN - nn + 1.0);
  return log_choose + nn * std::log(p) + (NN - nn) * std::log1p(-p);
}

}  // namespace

std::vector<cplx> binomial_amplitudes(const BinomialSpec& spec, std::size_t length) {
  spec.validate();
  if (spec.N + 1 > length) {
    throw CutoffError("binomial state with N=" + std::to_string(spec.N) +
                      " does not fit in the retained Fock space");
  }
  std::vector<cplx> c(length, cplx{});
  for (std::size_t n = 0; n <= spec.N; ++n) {
    const double lw = log_weight(spec.N, n, spec.p);
    if (lw == -INFINITY) continue;
    c[n] = std::polar(std::exp(0.5 * lw), static_cast<double>(n) * spec.phi);
  }
  return c;
}

std::vector<cplx> cat_amplitudes(const CatSpec& spec, std::size_t length) {
  auto a = binomial_amplitudes(spec.base, length);
  const auto b = binomial_amplitudes(spec.base.partner(), length);
  const double norm = spec.normalization();
  for (std::size_t n = 0; n < length; ++n) a[n] = norm * (a[n] + spec.eta * b[n]);
  return a;
}

namespace {
std::vector<Level> default_spins(const HilbertLayout& layout, std::vector<Level> spins) {
  if (spins.empty()) spins.assign(layout.atom_count(), Level::down);
  return spins;
}
}  // namespace

QuantumState binomial_state(const HilbertLayout& layout, const BinomialSpec& spec,
                            std::vector<Level> spins) {
  return product_state(layout, binomial_amplitudes(spec, layout.fock_cutoff() + 1),
                       default_spins(layout, std::move(spins)));
}

QuantumState cat_state(const HilbertLayout& layout, const CatSpec& spec, std::vector<Level> spins) {
  return product_state(layout, cat_amplitudes(spec, layout.fock_cutoff() + 1),
                       default_spins(layout, std::move(spins)));
}

cplx binomial_overlap(const BinomialSpec& a, const BinomialSpec& b) {
  a.validate();
  b.validate();
  if (a.N != b.N) throw Error("binomial_overlap requires equal N");
  const cplx base = std::sqrt((1.0 - a.p) * (1.0 - b.p)) +
                    std::sqrt(a.p * b.p) * std::polar(1.0, b.phi - a.phi);
  cplx r{1.0, 0.0};
  for (std::size_t k = 0; k < a.N; ++k) r *= base;
  return r;
}

double component_projection(const DensityMatrix& cavity_rho, const BinomialSpec& spec) {
  return cavity_rho.expectation(binomial_amplitudes(spec, cavity_rho.dimension()));
}

double component_projection(const QuantumState& state, const BinomialSpec& spec) {
  return component_projection(reduced_density(state, Subsystems::cavity_only()), spec);
}

double cavity_fidelity(const QuantumState& state, const CatSpec& target) {
  const DensityMatrix rho = reduced_density(state, Subsystems::cavity_only());
  return rho.expectation(cat_amplitudes(target, rho.dimension()));
}

cplx fit_cat_weight(const QuantumState& state, const BinomialSpec& base) {
  const std::size_t len = state.layout().fock_cutoff() + 1;
  const auto a = binomial_amplitudes(base, len);
  const auto b = binomial_amplitudes(base.partner(), len);
  // Uses the atomic sector with the most weight on the two components.
  cplx ca{}, cb{};
  const HilbertLayout& L = state.layout();
  const std::size_t stride = L.atom_states();
  cplx best_a{}, best_b{};
  double best = -1.0;
  for (std::size_t s = 0; s < stride; ++s) {
    ca = cb = cplx{};
    for (std::size_t n = 0; n < len; ++n) {
      ca += std::conj(a[n]) * state[n * stride + s];
      cb += std::conj(b[n]) * state[n * stride + s];
    }
    const double w = std::norm(ca) + std::norm(cb);
    if (w > best) {
      best = w;
      best_a = ca;
      best_b = cb;
    }
  }
  if (std::abs(best_a) == 0.0) throw Error("state has no weight on the base component");
  return best_b / best_a;
}

}  // namespace bsc
