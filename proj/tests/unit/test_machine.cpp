#include <gtest/gtest.h>

#include "ctlcalc/difftest.hpp"
#include "ctlcalc/machine.hpp"
#include "ctlcalc/parser.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace ctlcalc;

namespace {

Term P(std::string_view s) { return parse_term(s); }

bool aeq(const Term& a, const Term& b) { return testsup::db_key(a) == testsup::db_key(b); }

}  // namespace

TEST(Decompose, SeqOfReturnIsTheRedex) {
  Term c = P("(let x (return ()) (return x))");
  auto d = decompose(c, Calculus::Mam);
  ASSERT_EQ(d.kind, DecomposeResult::Kind::Redex);
  EXPECT_TRUE(d.decomposition.frames.empty());
  EXPECT_EQ(d.decomposition.redex, c);
}

TEST(Decompose, ShiftUnderPureFrameSelectsDollar) {
  Term c = P("(dollar (let x (shift0 k (return ())) (return x)) y (return y))");
  auto d = decompose(c, Calculus::Del);
  ASSERT_EQ(d.kind, DecomposeResult::Kind::Redex);
  EXPECT_TRUE(d.decomposition.frames.empty());
  EXPECT_EQ(d.decomposition.redex, c);
  ASSERT_EQ(d.decomposition.inner.size(), 1u);
  EXPECT_EQ(d.decomposition.inner[0].kind(), Kind::Seq);
  EXPECT_EQ(d.decomposition.control.kind(), Kind::Shift0);
}

TEST(Decompose, ShiftWithoutDollarIsStuck) {
  auto d = decompose(P("(shift0 k (return ()))"), Calculus::Del);
  EXPECT_EQ(d.kind, DecomposeResult::Kind::NoRedex);
  EXPECT_EQ(d.reason, StuckReason::ShiftWithoutDollar);
}

TEST(Decompose, TerminalReturn) {
  auto d = decompose(P("(return (inj A ()))"), Calculus::Mam);
  ASSERT_EQ(d.kind, DecomposeResult::Kind::Terminal);
  EXPECT_EQ(pretty(d.value), "(inj A ())");
}

TEST(Decompose, FramesOutermostFirst) {
  Term c = P("(prj 1 (app (let x (force (thunk (return ()))) (return x)) ()))");
  auto d = decompose(c, Calculus::Mam);
  ASSERT_EQ(d.kind, DecomposeResult::Kind::Redex);
  const auto& f = d.decomposition.frames;
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].kind(), Kind::Prj);
  EXPECT_EQ(f[1].kind(), Kind::App);
  EXPECT_EQ(f[2].kind(), Kind::Seq);
  EXPECT_EQ(d.decomposition.redex.kind(), Kind::Force);
  EXPECT_TRUE(alpha_equal(plug(f, d.decomposition.redex), c));
}

TEST(Decompose, ForeignConstructorIsStuck) {
  auto d = decompose(P("(dollar (return ()) x (return x))"), Calculus::Ac);
  EXPECT_EQ(d.kind, DecomposeResult::Kind::NoRedex);
  EXPECT_EQ(d.reason, StuckReason::ForeignConstructor);
}

TEST(Decompose, NestedDollarFindsInnermost) {
  // the inner dollar delimits the shift0
  Term c = P("(dollar (dollar (shift0 k (return ())) a (return a)) b (return b))");
  auto d = decompose(c, Calculus::Del);
  ASSERT_EQ(d.kind, DecomposeResult::Kind::Redex);
  ASSERT_EQ(d.decomposition.frames.size(), 1u);
  EXPECT_EQ(d.decomposition.redex, c.kid(0));
}

TEST(Step, ForceThunk) {
  auto r = step(Config::running(P("(force (thunk (return ())))")), Calculus::Mam);
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(r.rule, "force");
  EXPECT_EQ(pretty(r.next.comp), "(return ())");
  EXPECT_EQ(r.next.store.size(), 0u);
}

TEST(Step, ShiftStoresContinuation) {
  Term c = P("(dollar (let x (shift0 k (throw k ())) (return (pair x x))) z (return (inj A z)))");
  auto r = step(Config::running(c), Calculus::Del);
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(r.rule, "shift");
  EXPECT_EQ(pretty(r.next.comp), "(throw #d0 ())");
  ASSERT_EQ(r.delta.size(), 1u);
  EXPECT_FALSE(r.delta[0].before.has_value());
  const StoreEntry* e = r.next.store.find({LabelSort::Del, 0});
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->kind, EntryKind::DelCont);
  Term expect = P("(lam y (dollar (let x (return y) (return (pair x x))) z (return (inj A z))))");
  EXPECT_TRUE(aeq(e->term, expect)) << pretty(e->term);
}

TEST(Step, ThrowConsumesAndRunsContinuation) {
  Term c = P("(dollar (let x (shift0 k (throw k ())) (return (pair x x))) z (return (inj A z)))");
  Outcome o = evaluate(c, Calculus::Del, 100);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(inj A (pair () ()))");
  // shift, throw, let, ret
  EXPECT_EQ(o.steps, 4u);
  const StoreEntry* e = o.final.store.find({LabelSort::Del, 0});
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->kind, EntryKind::Nil);
}

TEST(Step, ResumeOfConsumedCoroutineFails) {
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  auto r = step(Config::running(mk::resume(mk::ac_label(0), mk::unit()), s), Calculus::Ac);
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(r.rule, "fail");
  EXPECT_TRUE(r.next.bottom);
}

TEST(Step, YieldStoresRestOfCoroutine) {
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  Term c = mk::labeled(0, P("(let x (yield (inj B ())) (return (pair x x)))"));
  auto r = step(Config::running(c, s), Calculus::Ac);
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(r.rule, "yield");
  EXPECT_EQ(pretty(r.next.comp), "(return (inj B ()))");
  const StoreEntry* e = r.next.store.find({LabelSort::Ac, 0});
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->kind, EntryKind::AcVal);
  EXPECT_TRUE(aeq(e->term, P("(thunk (lam y (let x (return y) (return (pair x x)))))"))) << pretty(e->term);
}

TEST(Step, AcRetLeavesStoreUnchanged) {
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  auto r = step(Config::running(mk::labeled(0, mk::ret(mk::unit())), s), Calculus::Ac);
  ASSERT_EQ(r.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(r.rule, "ret");
  EXPECT_TRUE(r.delta.empty());
  EXPECT_EQ(r.next.store.size(), 1u);
}

TEST(Step, ErrorConfigurationDoesNotStep) {
  EXPECT_THROW(step(Config::error(), Calculus::Ac), std::invalid_argument);
}

TEST(Step, PairBinderShadowing) {
  Outcome o = evaluate(P("(pcase (pair (inj A ()) (inj B ())) (x x) (return x))"), Calculus::Mam, 10);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(inj B ())");
}

TEST(Step, StuckReasons) {
  auto reason = [](std::string_view text, Calculus c) {
    Outcome o = evaluate(parse_program(text, c), c, 100);
    EXPECT_EQ(o.kind, OutcomeKind::Stuck) << text;
    return o.reason;
  };
  EXPECT_EQ(reason("(force ())", Calculus::Mam), StuckReason::NotAThunk);
  EXPECT_EQ(reason("(pcase () (a b) (return a))", Calculus::Mam), StuckReason::NotAPair);
  EXPECT_EQ(reason("(case () (A x (return x)))", Calculus::Mam), StuckReason::NotAnInjection);
  EXPECT_EQ(reason("(case (inj B ()) (A x (return x)))", Calculus::Mam), StuckReason::NoMatchingClause);
  EXPECT_EQ(reason("(app (return ()) ())", Calculus::Mam), StuckReason::ReturnInApplication);
  EXPECT_EQ(reason("(lam x (return x))", Calculus::Mam), StuckReason::TerminalNonReturn);
  EXPECT_EQ(reason("(yield ())", Calculus::Ac), StuckReason::YieldWithoutLabeled);
  EXPECT_EQ(reason("(op E ())", Calculus::Eff), StuckReason::OpWithoutHandler);
  EXPECT_EQ(reason("(handle (handler (ret x (return x)) (on F p k (return p))) (op E ()))", Calculus::Eff),
            StuckReason::UnhandledOp);
  EXPECT_EQ(reason("(let k (return ()) (throw k ()))", Calculus::Del), StuckReason::NotALabel);
}

TEST(Evaluate, CorpusOutcomes) {
  EXPECT_EQ(evaluate(corpus_entry("M_del")->program, Calculus::Del, 100000).kind, OutcomeKind::Bottom);
  Outcome m = evaluate(corpus_entry("M_ref")->program, Calculus::Ref, 100000);
  ASSERT_EQ(m.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(m.value), "(pair (inj A ()) (inj B ()))");
  EXPECT_EQ(evaluate(corpus_entry("omega")->program, Calculus::Mam, 1000).kind, OutcomeKind::FuelExhausted);
  EXPECT_EQ(evaluate(corpus_entry("double_throw_eff")->program, Calculus::Eff, 100000).kind, OutcomeKind::Bottom);
  EXPECT_EQ(evaluate(corpus_entry("double_throw_del")->program, Calculus::Del, 100000).kind, OutcomeKind::Bottom);
  Outcome l = evaluate(corpus_entry("L_ref")->program, Calculus::Ref, 100000);
  ASSERT_EQ(l.kind, OutcomeKind::Value);
  EXPECT_EQ(l.value.kind(), Kind::Unit);
}

TEST(Evaluate, OmegaUsesExactlyTheFuel) {
  Outcome o = evaluate(P("(app (lam x (app (force x) x)) (thunk (lam x (app (force x) x))))"), Calculus::Mam, 1000);
  EXPECT_EQ(o.kind, OutcomeKind::FuelExhausted);
  EXPECT_EQ(o.steps, 1000u);
}

TEST(Evaluate, RejectsNonPrograms) {
  EXPECT_THROW(evaluate(P("(return x)"), Calculus::Mam, 10), std::invalid_argument);
  EXPECT_THROW(evaluate(P("(shift0 k (return ()))"), Calculus::Ac, 10), std::invalid_argument);
}

TEST(Evaluate, HandlerReturnClause) {
  Term p = parse_program("(handle (handler (ret x (return (inj A x))) (on E p k (throw k p))) (op E (inj B ())))",
                         Calculus::Eff);
  Outcome o = evaluate(p, Calculus::Eff, 100);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(inj A (inj B ()))");
}

TEST(Evaluate, DeepHandlerReinstallsItself) {
  // the continuation reinstalls the handler, so the second op is handled too
  Term p = parse_program(
      "(handle (handler (ret x (return x)) (on E p k (let r (throw k p) (return (inj A r)))))"
      " (let a (op E ()) (op E a)))",
      Calculus::Eff);
  Outcome o = evaluate(p, Calculus::Eff, 100);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(inj A (inj A ()))");
}

TEST(Evaluate, RefCells) {
  Term p = parse_program("(let r (ref (inj A ())) (let u (set! r (inj B ())) (let a (get r) (let b (get r) (return (pair a b))))))",
                         Calculus::Ref);
  Outcome o = evaluate(p, Calculus::Ref, 100);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(pair (inj B ()) (inj B ()))");
}

TEST(Evaluate, TraceRecordsDeltas) {
  Outcome o = evaluate(corpus_entry("M_del")->program, Calculus::Del, 1000, true);
  ASSERT_EQ(o.trace.size(), o.steps);
  EXPECT_EQ(o.trace.front().rule, "shift");
  EXPECT_EQ(o.trace.back().rule, "fail");
  EXPECT_TRUE(o.trace.back().comp.empty());
  std::size_t lines = 0;
  std::istringstream in(trace_to_jsonl(o));
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("step") && j.contains("rule") && j.contains("computation") && j.contains("store_delta"));
    ++lines;
  }
  EXPECT_EQ(lines, o.steps);
}

TEST(Evaluate, TraceCap) {
  EvalOptions opts;
  opts.fuel = 500;
  opts.trace = true;
  opts.max_trace = 10;
  Outcome o = evaluate(corpus_entry("omega")->program, Calculus::Mam, opts);
  EXPECT_EQ(o.trace.size(), 10u);
  EXPECT_TRUE(o.trace_truncated);
  EXPECT_EQ(o.steps, 500u);
}

TEST(FreshLabel, PerSortCounters) {
  Store s;
  EXPECT_EQ(pretty(fresh_label(s, LabelSort::Del)), "#d0");
  EXPECT_EQ(pretty(fresh_label(s, LabelSort::Del)), "#d1");
  EXPECT_EQ(pretty(fresh_label(s, LabelSort::Ac)), "#c0");
  EXPECT_THROW(fresh_label(s, LabelSort::Eff), std::invalid_argument);
}

TEST(WellFormed, NestedSameLabelRejected) {
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  auto v = ac_well_formed(Config::running(mk::labeled(0, mk::labeled(0, mk::ret(mk::unit()))), s));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->label, 0u);
}

TEST(WellFormed, Examples) {
  EXPECT_FALSE(ac_well_formed(Config::running(mk::ret(mk::unit()))).has_value());
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  EXPECT_FALSE(ac_well_formed(Config::running(mk::labeled(0, mk::ret(mk::unit())), s)).has_value());
}

TEST(WellFormed, ActiveLabelMustBeNil) {
  Store s;
  s.set({LabelSort::Ac, 0}, {EntryKind::AcVal, mk::thunk(mk::lam("y", mk::ret(mk::var("y"))))});
  EXPECT_TRUE(ac_well_formed(Config::running(mk::labeled(0, mk::ret(mk::unit())), s)).has_value());
  EXPECT_TRUE(ac_well_formed(Config::running(mk::labeled(0, mk::ret(mk::unit())))).has_value());
}

TEST(WellFormed, StoredValuesHaveNoActiveLabels) {
  Store s;
  s.set({LabelSort::Ac, 0}, StoreEntry::nil());
  s.set({LabelSort::Ac, 1}, {EntryKind::AcVal, mk::thunk(mk::lam("y", mk::labeled(0, mk::ret(mk::unit()))))});
  EXPECT_TRUE(ac_well_formed(Config::running(mk::ret(mk::unit()), s)).has_value());
}

TEST(WellFormed, IncrementalAgreesWithFull) {
  for (const Term& p : testsup::programs(Calculus::Ac, 150, 5)) {
    EvalOptions opts;
    opts.fuel = 2000;
    opts.observer = [&](const Config& cfg, const std::vector<StoreDelta>& delta) {
      if (cfg.bottom) return;
      EXPECT_EQ(ac_well_formed(cfg).has_value(), ac_well_formed_after(cfg, delta).has_value()) << pretty(cfg.comp);
    };
    evaluate(p, Calculus::Ac, opts);
  }
}

TEST(ForwardOps, UnhandledOpReachesOuterHandler) {
  Term p = parse_program(
      "(handle (handler (ret x (return x)) (on E p k (throw k (inj A p))))"
      " (handle (handler (ret y (return y)) (on F q j (return q))) (op E ())))",
      Calculus::Eff);
  EXPECT_EQ(evaluate(p, Calculus::Eff, 100).kind, OutcomeKind::Stuck);
  Term fwd = forward_ops(p);
  EXPECT_FALSE(check_calculus(fwd, Calculus::Eff, true).has_value());
  Outcome o = evaluate(fwd, Calculus::Eff, 100);
  ASSERT_EQ(o.kind, OutcomeKind::Value);
  EXPECT_EQ(pretty(o.value), "(inj A ())");
}

TEST(Machine, AgreesWithBigStepReference) {
  for (std::uint64_t seed : {1u, 2u}) {
    for (const Term& p : testsup::programs(Calculus::Mam, 300, seed)) {
      testsup::MamReference ref(5000);
      auto r = ref.run(p);
      Outcome o = evaluate(p, Calculus::Mam, 5000);
      switch (r.kind) {
        case testsup::RefResult::Kind::Value:
          ASSERT_EQ(o.kind, OutcomeKind::Value) << pretty(p);
          EXPECT_TRUE(aeq(o.value, r.value)) << pretty(p);
          EXPECT_EQ(o.steps, r.steps) << pretty(p);
          break;
        case testsup::RefResult::Kind::Stuck:
          EXPECT_EQ(o.kind, OutcomeKind::Stuck) << pretty(p);
          break;
        case testsup::RefResult::Kind::Fuel:
          EXPECT_EQ(o.kind, OutcomeKind::FuelExhausted) << pretty(p);
          break;
      }
    }
  }
}
