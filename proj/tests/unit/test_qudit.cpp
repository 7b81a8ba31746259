#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "sqlayer/qudit.hpp"
#include "sqlayer/rng.hpp"

using namespace sqlayer;

namespace {

UnitaryMatrix qubit_flip() { return UnitaryMatrix(Dims{2}, {0.0, 1.0, 1.0, 0.0}); }

UnitaryMatrix cnot() {
  std::vector<Complex> m(16, 0.0);
  m[0 * 4 + 0] = 1.0;
  m[1 * 4 + 1] = 1.0;
  m[2 * 4 + 3] = 1.0;
  m[3 * 4 + 2] = 1.0;
  return UnitaryMatrix(Dims{2, 2}, std::move(m));
}

}  // namespace

TEST_CASE("Dims validates entries and computes big-endian strides") {
  Dims d{4, 4, 2};
  CHECK(d.total() == 32);
  CHECK(d.stride(0) == 8);
  CHECK(d.stride(2) == 1);
  CHECK(d.flatten(std::vector<int>{3, 3, 1}) == 31);
  CHECK(d.unflatten(20) == std::vector<int>{2, 2, 0});
  CHECK_THROWS_AS(Dims({4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(d.flatten(std::vector<int>{4, 0, 0}), std::out_of_range);
}

TEST_CASE("make normalizes and rejects bad input") {
  auto zero = QuditState::make(Dims{2}, {1.0, 0.0});
  CHECK(zero[0] == Complex(1.0));
  auto plus = QuditState::make(Dims{2}, {1.0, 1.0});
  CHECK(std::abs(plus[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(plus.norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(QuditState::make(Dims{2}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(QuditState::make(Dims{2}, {1.0}), std::invalid_argument);

  const auto psi = oracle::lsqkd_state();
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  CHECK(psi.applied_scale() == doctest::Approx(1.0));
}

TEST_CASE("UnitaryMatrix checks unitarity") {
  CHECK_NOTHROW(qubit_flip());
  CHECK_THROWS_AS(UnitaryMatrix(Dims{2}, {1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(UnitaryMatrix(Dims{2}, {1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("tensor products") {
  auto ket01 = tensor(QuditState::basis(Dims{2}, {0}), QuditState::basis(Dims{2}, {1}));
  CHECK(ket01.dims() == Dims{2, 2});
  CHECK(ket01.amplitude({0, 1}) == Complex(1.0));

  // Bell (x) GHZ3 gives four terms of amplitude 1/2 on five qubits.
  auto bell = oracle::from_terms(Dims{2, 2}, {{{0, 0}, 1.0}, {{1, 1}, 1.0}});
  auto ghz = oracle::from_terms(Dims{2, 2, 2}, {{{0, 0, 0}, 1.0}, {{1, 1, 1}, 1.0}});
  auto beta = tensor(bell, ghz);
  CHECK(beta.dims().size() == 5);
  int terms = 0;
  for (auto a : beta.amplitudes())
    if (std::abs(a) > 1e-12) {
      ++terms;
      CHECK(std::abs(a - 0.5) < 1e-12);
    }
  CHECK(terms == 4);
  CHECK(beta.amplitude({1, 1, 0, 0, 0}).real() == doctest::Approx(0.5));
  CHECK(std::abs(beta.norm() - 1.0) < 1e-12);
}

TEST_CASE("apply_unitary") {
  const auto psi = oracle::lsqkd_state();
  auto same = apply_unitary(psi, {1}, UnitaryMatrix::identity(Dims{4}));
  CHECK(max_amplitude_diff(same, psi) == 0.0);

  auto flipped = apply_unitary(psi, {2}, qubit_flip());
  CHECK(flipped.amplitude({0, 0, 1}).real() == doctest::Approx(0.5));
  CHECK(flipped.amplitude({1, 1, 0}).real() == doctest::Approx(0.5));
  CHECK(std::abs(flipped.amplitude({0, 0, 0})) < 1e-15);

  auto plus0 = QuditState::make(Dims{2, 2}, {1.0, 0.0, 1.0, 0.0});
  auto bell = apply_unitary(plus0, {0, 1}, cnot());
  CHECK(bell.amplitude({0, 0}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(bell.amplitude({1, 1}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(bell.amplitude({1, 0})) < 1e-15);

  // Reversed target order means the second listed subsystem is the control.
  auto zero_plus = QuditState::make(Dims{2, 2}, {1.0, 1.0, 0.0, 0.0});
  auto rev = apply_unitary(zero_plus, {1, 0}, cnot());
  CHECK(rev.amplitude({1, 1}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  CHECK_THROWS_AS(apply_unitary(psi, {0}, qubit_flip()), std::invalid_argument);
  CHECK_THROWS(apply_unitary(psi, {2, 2}, cnot()));
}

TEST_CASE("attach_ancilla") {
  const auto psi = oracle::lsqkd_state();
  auto a2 = attach_ancilla(psi, 2);
  CHECK(a2.dims() == Dims{4, 4, 2, 2});
  auto a4 = attach_ancilla(psi, 4);
  CHECK(a4.dims() == Dims{4, 4, 2, 4});
  auto id = apply_unitary(a2, {3}, UnitaryMatrix::identity(Dims{2}));
  CHECK(max_amplitude_diff(id, a2) == 0.0);
  CHECK(attach_ancilla(psi, 2, 1).amplitude({0, 0, 0, 1}).real() == doctest::Approx(0.5));
  CHECK_THROWS(attach_ancilla(psi, 2, 2));
}

TEST_CASE("measure_computational on the LSQKD state") {
  const auto psi = oracle::lsqkd_state();
  std::map<std::vector<int>, int> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    RngStream rng(11, s);
    auto m = measure_computational(psi, {0, 1, 2}, rng);
    CHECK(m.prob == doctest::Approx(0.25));
    CHECK(std::norm(m.post.amplitude(m.outcomes)) == doctest::Approx(1.0));
    ++seen[m.outcomes];
  }
  CHECK(seen.size() == 4);
  CHECK(seen.count({0, 0, 0}));
  CHECK(seen.count({2, 2, 0}));
  CHECK(seen.count({3, 3, 1}));
  CHECK(seen.count({1, 1, 1}));

  RngStream rng(1, 1);
  auto basis = measure_computational(QuditState::basis(Dims{4}, {2}), {0}, rng);
  CHECK(basis.outcomes[0] == 2);
  CHECK(basis.prob == doctest::Approx(1.0));

  // Outcome 0 on the two-level subsystem leaves (|00> + |22>)/sqrt2 (x) |0>.
  auto c = collapse(psi, std::vector<std::size_t>{2}, std::vector<int>{0});
  REQUIRE(c.post);
  CHECK(c.prob == doctest::Approx(0.5));
  CHECK(c.post->amplitude({0, 0, 0}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(c.post->amplitude({2, 2, 0}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(c.post->amplitude({1, 1, 1})) < 1e-15);
  CHECK_FALSE(collapse(psi, std::vector<std::size_t>{0, 1}, std::vector<int>{0, 1}).post);
}

TEST_CASE("measurement frequencies follow the Born rule") {
  auto st = QuditState::make(Dims{3}, {1.0, std::sqrt(2.0), 1.0});
  int ones = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    RngStream rng(5, static_cast<std::uint64_t>(s));
    ones += measure_computational(st, {0}, rng).outcomes[0] == 1;
  }
  const double f = static_cast<double>(ones) / n;
  CHECK(std::abs(f - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("outcome_distribution") {
  const auto psi = oracle::lsqkd_state();
  auto all = outcome_distribution(psi);
  CHECK(all.support_size() == 4);
  CHECK(all.prob({2, 2, 0}) == doctest::Approx(0.25));
  auto ket01 = outcome_distribution(QuditState::basis(Dims{2, 2}, {0, 1}));
  CHECK(ket01.support_size() == 1);
  CHECK(ket01.prob({0, 1}) == doctest::Approx(1.0));

  const auto phi = oracle::lsqss_state();
  for (std::size_t s = 0; s < 5; ++s) {
    auto d = outcome_distribution(phi, std::vector<std::size_t>{s});
    for (double p : d.probs) CHECK(p == doctest::Approx(0.25));
  }
  // Marginal over a reordered pair is indexed in the listed order.
  auto pair = outcome_distribution(psi, std::vector<std::size_t>{2, 0});
  CHECK(pair.prob({1, 3}) == doctest::Approx(0.25));
  CHECK(pair.prob({0, 3}) == doctest::Approx(0.0));
}

TEST_CASE("project_onto") {
  const auto psi = oracle::lsqkd_state();
  auto self = project_onto(psi, psi);
  CHECK(self.success_prob == doctest::Approx(1.0));
  CHECK(self.failure_prob < 1e-28);
  CHECK_FALSE(self.fail);

  auto p000 = project_onto(QuditState::basis(psi.dims(), {0, 0, 0}), psi);
  CHECK(p000.success_prob == doctest::Approx(0.25));
  CHECK(p000.failure_prob == doctest::Approx(0.75));
  REQUIRE(p000.pass);
  CHECK(max_amplitude_diff(*p000.pass, psi) < 1e-12);

  // Intercept on the second subsystem: average success over the four
  // collapsed branches is 1/4.
  double mean = 0.0;
  for (int b = 0; b < 4; ++b) {
    auto c = collapse(psi, std::vector<std::size_t>{1}, std::vector<int>{b});
    mean += c.prob * project_onto(*c.post, psi).success_prob;
  }
  CHECK(mean == doctest::Approx(0.25));

  // Trailing ancillas see the identity.
  auto with_anc = attach_ancilla(psi, 2, 1);
  CHECK(project_onto(with_anc, psi).success_prob == doctest::Approx(1.0));
  CHECK_THROWS(project_onto(psi, with_anc));
}

TEST_CASE("permute, regroup and phase fixing") {
  const auto psi = oracle::lsqkd_state();
  std::vector<std::size_t> order{2, 0, 1};
  auto p = permute_subsystems(psi, order);
  CHECK(p.dims() == Dims{2, 4, 4});
  CHECK(p.amplitude({1, 3, 3}).real() == doctest::Approx(0.5));

  auto q = regroup(QuditState::basis(Dims{2, 2}, {1, 0}), Dims{4});
  CHECK(q.amplitude({2}).real() == doctest::Approx(1.0));
  CHECK_THROWS(regroup(psi, Dims{4, 4}));

  auto rotated = QuditState::make(Dims{2}, {Complex(0.0, 1.0), Complex(-1.0, 0.0)});
  auto fixed = phase_fixed(rotated);
  CHECK(fixed[0].real() > 0.0);
  CHECK(std::abs(fixed[0].imag()) < 1e-15);
  CHECK(fixed[1].imag() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(approx_equal(phase_fixed(psi), psi));
}

TEST_CASE("RngStream is counter based") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  RngStream u(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    const int k = u.below(4);
    CHECK(k >= 0);
    CHECK(k < 4);
  }
  CHECK(RngStream(9, 9).split(1)() == RngStream(9, 9).split(1)());
  CHECK(RngStream(9, 9).split(1)() != RngStream(9, 9).split(2)());
}
