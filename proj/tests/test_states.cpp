#include <doctest.h>

#include <random>

#include "bsc/states.hpp"
#include "support.hpp"

using namespace bsc;
using oracle::pi;

namespace {
oracle::Vec amps(const BinomialSpec& s, std::size_t len) {
  const auto v = binomial_amplitudes(s, len);
  return Eigen::Map<const oracle::Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

TEST_CASE("binomial edge cases p = 0 and p = 1") {
  const auto vac = amps({2, 0.0, 1.3}, 5);
  CHECK(std::abs(vac(0) - 1.0) < 1e-15);
  CHECK(vac.tail(4).norm() == 0.0);

  const double phi = 0.7;
  const auto top = amps({2, 1.0, phi}, 5);
  CHECK(std::abs(top(2) - std::polar(1.0, 2 * phi)) < 1e-15);
  CHECK(std::abs(top(0)) == 0.0);
  CHECK(std::abs(top(1)) == 0.0);
}

TEST_CASE("binomial N=2, p=0.5, phi=0") {
  const auto v = amps({2, 0.5, 0.0}, 3);
  CHECK(std::abs(v(0) - 0.5) < 1e-15);
  CHECK(std::abs(v(1) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v(2) - 0.5) < 1e-15);
}

TEST_CASE("one-photon binomial state") {
  const double p = 0.37, phi = -0.4;
  const auto v = amps({1, p, phi}, 4);
  CHECK(std::abs(v(0) - std::sqrt(1 - p)) < 1e-15);
  CHECK(std::abs(v(1) - std::sqrt(p) * std::polar(1.0, phi)) < 1e-15);
}

TEST_CASE("binomial amplitudes match direct powers") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0, 1), Phi(-pi, pi);
  for (int k = 0; k < 500; ++k) {
    const int N = static_cast<int>(rng() % 7);
    const double p = U(rng), phi = Phi(rng);
    const auto v = amps({std::size_t(N), p, phi}, 9);
    CHECK(support::max_diff(v, oracle::binomial(N, p, phi, 9)) < 1e-13);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("binomial rejects bad specs") {
  CHECK_THROWS_AS(binomial_amplitudes({3, 0.5, 0}, 3), CutoffError);
  CHECK_THROWS(binomial_amplitudes({2, 1.5, 0}, 3));
  CHECK_THROWS(binomial_amplitudes({2, -0.1, 0}, 3));
  CHECK_THROWS_AS(binomial_state(HilbertLayout(2, 0), {3, 0.5, 0}), CutoffError);
}

TEST_CASE("overlap examples") {
  const BinomialSpec a{2, 0.3, 0.0};
  CHECK(std::abs(binomial_overlap(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(binomial_overlap(a, a.partner())) < 1e-15);
  const cplx z = binomial_overlap(a, {2, 0.3, pi / 2});
  CHECK(z.real() == doctest::Approx(0.40).epsilon(1e-12));
  CHECK(z.imag() == doctest::Approx(0.42).epsilon(1e-12));
  CHECK_THROWS(binomial_overlap(a, {3, 0.3, 0.0}));
}

TEST_CASE("closed-form overlap equals explicit sum") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0, 1), Phi(-pi, pi);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t N = rng() % 7;
    const BinomialSpec a{N, U(rng), Phi(rng)};
    const BinomialSpec b{N, U(rng), Phi(rng)};
    const cplx ref = oracle::dot(oracle::binomial(int(N), a.p, a.phi, 7), oracle::binomial(int(N), b.p, b.phi, 7));
    CHECK(std::abs(binomial_overlap(a, b) - ref) < 1e-12);
    if (N > 0) CHECK(std::abs(binomial_overlap(a, a.partner())) < 1e-12);
  }
}

TEST_CASE("N = 0 has no orthogonal partner") {
  const BinomialSpec a{0, 0.3, 0.2};
  CHECK(std::abs(binomial_overlap(a, a.partner()) - 1.0) < 1e-15);
}

TEST_CASE("mean photon number equals N p") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  const HilbertLayout L(8, 1);
  for (int k = 0; k < 200; ++k) {
    const std::size_t N = rng() % 7;
    const double p = U(rng);
    const auto s = binomial_state(L, {N, p, U(rng) * 6});
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    CHECK(std::abs(mean_photon_number(s) - double(N) * p) < 1e-10);
  }
}

TEST_CASE("cat state examples") {
  const HilbertLayout L(4, 0);
  const auto c = cat_state(L, CatSpec{{2, 0.0, 0.0}, 1.0});
  CHECK(std::abs(c[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(c[2] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);

  const BinomialSpec base{2, 0.3, 0.9};
  const auto plain = cat_state(L, CatSpec{base, 0.0});
  CHECK(fidelity(plain, binomial_state(L, base)) == doctest::Approx(1.0).epsilon(1e-14));

  const auto half = cat_state(L, CatSpec{{2, 0.5, 0.0}, 1.0});
  CHECK(std::abs(half.norm() - 1.0) < 1e-14);
  CHECK(std::abs(binomial_overlap({2, 0.5, 0.0}, BinomialSpec{2, 0.5, 0.0}.partner())) < 1e-15);
}

TEST_CASE("cat state matches oracle and keeps atoms in place") {
  const HilbertLayout L(5, 2);
  const CatSpec spec{{2, 0.2, 0.4}, std::polar(1.0, 1.3) * 0.7};
  const auto s = cat_state(L, spec, {Level::up, Level::down});
  const HilbertLayout C(5, 0);
  const auto cav = oracle::cat(2, 0.2, 0.4, spec.eta, 6);
  for (std::size_t n = 0; n <= 5; ++n) {
    CHECK(std::abs(s[L.index_of(n, {Level::up, Level::down})] - cav(int(n))) < 1e-14);
  }
  CHECK(excited_population(s, 0) == doctest::Approx(1.0));
}

TEST_CASE("component projection") {
  const HilbertLayout L(4, 1);
  const BinomialSpec b{2, 0.35, 0.2};
  const auto cat = cat_state(L, CatSpec{b, 1.0});
  CHECK(component_projection(cat, b) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(component_projection(binomial_state(L, b), b) == doctest::Approx(1.0).epsilon(1e-13));

  // Projection onto a phase-shifted binomial follows the closed-form overlaps.
  const BinomialSpec shifted{2, 0.35, 0.2 + 0.6};
  const cplx o1 = binomial_overlap(shifted, b);
  const cplx o2 = binomial_overlap(shifted, b.partner());
  const double expected = std::norm((o1 + o2) / std::sqrt(2.0));
  CHECK(component_projection(cat, shifted) == doctest::Approx(expected).epsilon(1e-13));

  const auto rho = reduced_density(cat, Subsystems::cavity_only());
  CHECK(component_projection(rho, b) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("fit_cat_weight recovers eta") {
  const HilbertLayout L(4, 2);
  const cplx eta = std::polar(1.0, -2.1);
  const BinomialSpec b{2, 0.6, 1.0};
  const auto s = cat_state(L, CatSpec{b, eta}, {Level::down, Level::down});
  CHECK(std::abs(fit_cat_weight(s, b) - eta) < 1e-12);
  CHECK(cavity_fidelity(s, CatSpec{b, eta}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cavity_fidelity(s, CatSpec{b, -eta}) < 1e-12);
}
