#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "sqlayer/analysis.hpp"

using namespace sqlayer;

namespace {

NetworkSpec fixture(int which) {
  switch (which) {
    case 0: return fixtures::fig2();
    case 1: return fixtures::fig5();
    default: return fixtures::fig6();
  }
}

ProtocolKind protocol(int which) {
  switch (which) {
    case 0: return ProtocolKind::LSQKD;
    case 1: return ProtocolKind::LSQSS;
    default: return ProtocolKind::ILSKSS;
  }
}

void BM_Synthesize(benchmark::State& state) {
  const auto net = fixture(static_cast<int>(state.range(0)));
  const auto proto = protocol(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(net, proto));
}
BENCHMARK(BM_Synthesize)->DenseRange(0, 2);

void BM_RunRound(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  Session s(fixture(w), protocol(w));
  std::vector<Action> acts(s.cps().size(), Action::Ctrl);
  std::uint64_t r = 0;
  for (auto _ : state) {
    RngStream rng(1, r++);
    benchmark::DoNotOptimize(run_round(s, acts, AliceChoice::Computational, nullptr, rng));
  }
}
BENCHMARK(BM_RunRound)->DenseRange(0, 2);

void BM_RunRoundUnderTwoWayAttack(benchmark::State& state) {
  Session s(fixtures::fig5(), ProtocolKind::LSQSS);
  AttackFamily fam{{"bob1"}, true, true, BackwardShape::PartialSwap, 1.0};
  const auto eve = instantiate(fam, s.network(), 0.7);
  std::vector<Action> acts(s.cps().size(), Action::Reflect);
  std::uint64_t r = 0;
  for (auto _ : state) {
    RngStream rng(2, r++);
    benchmark::DoNotOptimize(run_round(s, acts, AliceChoice::Projective, &eve, rng));
  }
}
BENCHMARK(BM_RunRoundUnderTwoWayAttack);

void BM_ExactDetectionIntercept(benchmark::State& state) {
  Session s(fixtures::fig5(), ProtocolKind::LSQSS);
  std::vector<std::string> targets{"bob1", "bob2", "bob3", "bob4", "bob5"};
  targets.resize(static_cast<std::size_t>(state.range(0)));
  const auto eve = intercept_resend(targets);
  for (auto _ : state) benchmark::DoNotOptimize(exact_detection(s, &eve));
}
BENCHMARK(BM_ExactDetectionIntercept)->DenseRange(1, 5, 2)->Unit(benchmark::kMillisecond);

void BM_ExactDetectionTwoWay(benchmark::State& state) {
  Session s(fixtures::fig2(), ProtocolKind::LSQKD);
  AttackFamily fam{{"bob1"}, true, true, BackwardShape::PartialSwap, 1.0};
  const auto eve = instantiate(fam, s.network(), 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(exact_detection(s, &eve));
}
BENCHMARK(BM_ExactDetectionTwoWay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
