#include "sqlayer/sqkd07.hpp"

#include <cmath>
#include <stdexcept>

namespace sqlayer {

namespace {

const UnitaryMatrix& hadamard() {
  static const double r = 1.0 / std::sqrt(2.0);
  static const UnitaryMatrix h(Dims{2}, {r, r, r, -r});
  return h;
}

QuditState prepare(Basis basis, int bit) {
  QuditState q = QuditState::basis(Dims{2}, {bit});
  return basis == Basis::X ? apply_unitary(q, {0}, hadamard()) : q;
}

int measure_in(const QuditState& q, Basis basis, QuditState& post, RngStream& rng) {
  if (basis == Basis::Z) {
    auto m = measure_computational(q, {0}, rng);
    post = std::move(m.post);
    return m.outcomes[0];
  }
  auto m = measure_computational(apply_unitary(q, {0}, hadamard()), {0}, rng);
  post = apply_unitary(m.post, {0}, hadamard());
  return m.outcomes[0];
}

}  // namespace

Sqkd07Transcript run_sqkd07(std::size_t rounds, const std::optional<Sqkd07Eve>& eve,
                            std::uint64_t seed) {
  if (rounds == 0) throw std::invalid_argument("run_sqkd07: rounds must be >= 1");
  Sqkd07Transcript t;
  t.rounds.reserve(rounds);
  for (std::size_t i = 0; i < rounds; ++i) {
    RngStream rng(seed, i);
    Sqkd07Round r;
    r.index = i;
    r.basis = rng.bernoulli(0.5) ? Basis::X : Basis::Z;
    r.bit = rng.below(2);
    r.action = rng.bernoulli(0.5) ? Action::Ctrl : Action::Reflect;

    QuditState q = prepare(r.basis, r.bit);
    if (eve) {
      const Basis eb = (eve->random_basis && rng.bernoulli(0.5)) ? Basis::X : Basis::Z;
      QuditState post = q;
      r.eve_basis = eb;
      r.eve_outcome = measure_in(q, eb, post, rng);
      q = std::move(post);
    }
    if (r.action == Action::Ctrl) {
      QuditState post = q;
      r.bob_outcome = measure_in(q, Basis::Z, post, rng);
      q = std::move(post);
    }
    QuditState post = q;
    r.alice_outcome = measure_in(q, r.basis, post, rng);
    t.rounds.push_back(r);
  }
  return t;
}

Sqkd07Sifted sift_sqkd07(const Sqkd07Transcript& transcript) {
  Sqkd07Sifted s;
  for (const auto& r : transcript.rounds) {
    if (r.action == Action::Reflect) {
      ClassTally& t = r.basis == Basis::Z ? s.reflect_z : s.reflect_x;
      ++t.trials;
      if (r.alice_outcome != r.bit) ++t.events;
    } else if (r.basis == Basis::Z) {
      ++s.ctrl_z.trials;
      if (r.alice_outcome != *r.bob_outcome) ++s.ctrl_z.events;
      s.alice_key.push_back(r.bit);
      s.bob_key.push_back(*r.bob_outcome);
    } else {
      ++s.discarded;
    }
  }
  return s;
}

}  // namespace sqlayer
