#include <benchmark/benchmark.h>

#include "ctlcalc/difftest.hpp"
#include "ctlcalc/parser.hpp"
#include "ctlcalc/translate.hpp"

using namespace ctlcalc;

namespace {

// A loop of n shift0/dollar round trips on a Peano counter.
Term countdown(std::uint64_t n) {
  Term body = mk::ret(mk::unit());
  for (std::uint64_t i = 0; i < n; ++i) {
    body = mk::dollar(mk::shift0("k", mk::throw_(mk::var("k"), mk::unit())), "x", body);
  }
  return body;
}

void BM_EvaluateDel(benchmark::State& state) {
  Term p = countdown(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    Outcome o = evaluate(p, Calculus::Del, 1000000);
    benchmark::DoNotOptimize(o.steps);
  }
}
BENCHMARK(BM_EvaluateDel)->Arg(10)->Arg(100)->Arg(400);

void BM_EvaluateCounterAc(benchmark::State& state) {
  Term p = translate(countdown(static_cast<std::uint64_t>(state.range(0))), TranslationId::DelToAcCounter);
  for (auto _ : state) {
    Outcome o = evaluate(p, Calculus::Ac, 10000000);
    benchmark::DoNotOptimize(o.steps);
  }
}
BENCHMARK(BM_EvaluateCounterAc)->Arg(10)->Arg(100);

void BM_Translate(benchmark::State& state) {
  const auto id = static_cast<TranslationId>(state.range(0));
  GenConfig g;
  g.calculus = source_of(id);
  g.seed = 1;
  std::vector<Term> programs;
  for (std::uint64_t i = 0; i < 200; ++i) programs.push_back(generate(g, i));
  for (auto _ : state) {
    for (const auto& p : programs) benchmark::DoNotOptimize(translate(p, id).size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * programs.size()));
  state.SetLabel(std::string(to_string(id)));
}
BENCHMARK(BM_Translate)->DenseRange(0, 5);

void BM_ParsePrint(benchmark::State& state) {
  GenConfig g;
  g.calculus = Calculus::Eff;
  g.seed = 2;
  std::vector<std::string> texts;
  for (std::uint64_t i = 0; i < 200; ++i) texts.push_back(print_program(generate(g, i)));
  for (auto _ : state) {
    for (const auto& t : texts) benchmark::DoNotOptimize(parse_program(t, Calculus::Eff).size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * texts.size()));
}
BENCHMARK(BM_ParsePrint);

void BM_Suite(benchmark::State& state) {
  const auto id = static_cast<TranslationId>(state.range(0));
  GenConfig g;
  g.seed = 3;
  SuiteOptions so;
  so.count = 100;
  for (auto _ : state) {
    SuiteReport r = run_suite(g, id, so);
    benchmark::DoNotOptimize(r.agree);
  }
  state.SetLabel(std::string(to_string(id)));
}
BENCHMARK(BM_Suite)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
