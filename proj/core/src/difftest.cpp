#include "ctlcalc/difftest.hpp"

#include <algorithm>
#include <random>

#include "ctlcalc/parser.hpp"
#include "json.hpp"

namespace ctlcalc {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 is fully specified; the draws below avoid the
// implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      const std::uint64_t x = g_();
      if (x < limit) return x % n;
    }
  }
  double unit() { return static_cast<double>(g_() >> 11) * 0x1p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 g_;
};

enum class Choice : std::uint8_t {
  Ret,
  Let,
  AppLam,
  AppForce,
  ForceThunk,
  ForceVar,
  PCase,
  Case,
  Prj,
  Dollar,
  Shift0,
  Throw,
  Op,
  HandleC,
  Ref,
  Get,
  Set,
  Create,
  Resume,
  Yield,
};

struct Option {
  Choice choice;
  Kind kind;  // for weight overrides
  double weight;
  std::size_t need;
  bool control;
};

// Coarse value shapes, so eliminators mostly receive something they can take
// apart. Any is for binders whose value the generator cannot predict.
enum class Shape : std::uint8_t { Any, Unit, Pair, Inj, Thunk, FnThunk };

struct Scope {
  std::vector<std::pair<std::string, Shape>> vals;
  std::vector<std::string> conts;  // continuation or coroutine names
  std::vector<std::string> refs;
  // Statically inside a delimiter (dollar, handler, coroutine body), so
  // shift0, op and yield have something to reach.
  bool delimited = false;

  [[nodiscard]] bool has(Shape want) const {
    return std::any_of(vals.begin(), vals.end(), [&](const auto& v) { return want == Shape::Any || v.second == want; });
  }
  void bind(std::string x, Shape sh) { vals.emplace_back(std::move(x), sh); }
};

Shape shape_of(const Term& v, const Scope& s) {
  switch (v.kind()) {
    case Kind::Unit: return Shape::Unit;
    case Kind::Pair: return Shape::Pair;
    case Kind::Inj: return Shape::Inj;
    case Kind::Thunk: return v.kid(0).kind() == Kind::Abs ? Shape::FnThunk : Shape::Thunk;
    case Kind::Var:
      for (auto it = s.vals.rbegin(); it != s.vals.rend(); ++it) {
        if (it->first == v.name()) return it->second;
      }
      return Shape::Any;
    default: return Shape::Any;
  }
}

const std::vector<std::string> kTags = {"A", "B"};

class Generator {
 public:
  Generator(const GenConfig& cfg, std::uint64_t index)
      : cfg_(cfg), rng_(splitmix(cfg.seed ^ splitmix(index + 1))) {
    pure_ = cfg.calculus == Calculus::Mam || rng_.chance(cfg.pure_share);
  }

  // The budget arithmetic below is approximate, so an oversized draw is
  // replaced by a fresh one with a tighter target.
  Term program() {
    const std::size_t limit = std::max<std::size_t>(cfg_.max_size, 2);
    std::size_t target = limit;
    for (;;) {
      counter_ = 0;
      Term p = draw(target);
      if (p.size() <= limit) return p;
      const std::size_t over = p.size() - limit;
      target = target > over + 2 ? target - over : 2;
    }
  }

 private:
  Term draw(std::size_t budget) {
    if (cfg_.calculus == Calculus::Eff && !pure_) {
      const std::size_t wrapper = 3 + 2 * cfg_.op_pool.size();
      if (budget >= wrapper + 2) {
        Scope s;
        const std::size_t extra = budget - wrapper - 2;
        const std::size_t clause_extra = std::min<std::size_t>(extra / 3, 2 * cfg_.op_pool.size());
        return handler_around(budget - wrapper - clause_extra, clause_extra, s, 0);
      }
    }
    return comp(budget, Scope{}, 0);
  }

  const GenConfig& cfg_;
  Rng rng_;
  bool pure_ = false;
  std::size_t counter_ = 0;

  std::string fresh(char prefix) { return std::string(1, prefix) + std::to_string(counter_++); }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[rng_.below(xs.size())];
  }

  Term pick_var(const Scope& s, Shape want) {
    std::vector<std::string> xs;
    for (const auto& [x, sh] : s.vals) {
      if (want == Shape::Any || sh == want) xs.push_back(x);
    }
    return mk::var(pick(xs));
  }

  // Splits `total` into parts no smaller than `mins`.
  std::vector<std::size_t> split(std::size_t total, const std::vector<std::size_t>& mins) {
    std::size_t floor = 0;
    for (auto m : mins) floor += m;
    const std::size_t spare = total - floor;
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i + 1 < mins.size(); ++i) cuts.push_back(rng_.below(spare + 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> out;
    std::size_t prev = 0;
    for (std::size_t i = 0; i < mins.size(); ++i) {
      const std::size_t cut = i < cuts.size() ? cuts[i] : spare;
      out.push_back(mins[i] + cut - prev);
      prev = cut;
    }
    return out;
  }

  double weight(Kind k, double dflt) const {
    auto it = cfg_.weights.find(k);
    return it == cfg_.weights.end() ? dflt : it->second;
  }

  template <typename O>
  int choose(const std::vector<O>& opts, std::size_t b) {
    double total = 0;
    for (const auto& o : opts) {
      if (o.need <= b) total += o.w;
    }
    double x = rng_.unit() * total;
    for (const auto& o : opts) {
      if (o.need > b) continue;
      if (x < o.w) return o.id;
      x -= o.w;
    }
    for (auto it = opts.rbegin(); it != opts.rend(); ++it) {
      if (it->need <= b) return it->id;
    }
    return opts.front().id;
  }

  // Smallest literal of a shape.
  static std::size_t min_size(Shape want) {
    switch (want) {
      case Shape::Pair: return 3;
      case Shape::Inj: return 2;
      case Shape::Thunk: return 3;
      case Shape::FnThunk: return 4;
      default: return 1;
    }
  }

  Term value(std::size_t b, const Scope& s, std::size_t depth, Shape want = Shape::Any) {
    struct V {
      int id;
      double w;
      std::size_t need;
    };
    const bool deep = depth < cfg_.binder_depth_cap;
    std::vector<V> opts;
    if (s.has(want)) opts.push_back({0, 3.0, 1});
    if (want == Shape::Any || want == Shape::Unit) opts.push_back({1, 2.0, 1});
    if (want == Shape::Any || want == Shape::Pair) opts.push_back({2, 1.5, 3});
    if (want == Shape::Any || want == Shape::Inj) opts.push_back({3, 2.0, 2});
    if ((want == Shape::Any && deep) || want == Shape::Thunk) opts.push_back({4, 2.0, 3});
    if ((want == Shape::Any && deep) || want == Shape::FnThunk) opts.push_back({6, 1.0, 4});
    if (want == Shape::Any || want == Shape::Inj) opts.push_back({5, 0.5, 2});
    const int id = choose(opts, b);
    // Past the depth cap, literals shrink to their smallest form.
    const bool small = !deep;
    switch (id) {
      case 0:
        return pick_var(s, want);
      case 2: {
        if (small) return mk::pair(mk::unit(), mk::unit());
        auto parts = split(b - 1, {1, 1});
        Term a = value(parts[0], s, depth + 1);
        return mk::pair(a, value(parts[1], s, depth + 1));
      }
      case 3:
        if (small) return mk::inj(pick(kTags), mk::unit());
        return mk::inj(pick(kTags), value(b - 1, s, depth + 1));
      case 4: {
        Scope inner = s;
        inner.delimited = false;  // forced at an unknown place
        if (small) return mk::thunk(mk::ret(mk::unit()));
        return mk::thunk(comp(b - 1, inner, depth + 1));
      }
      case 6: {
        Scope inner = s;
        inner.delimited = false;
        const std::string x = fresh('x');
        inner.bind(x, Shape::Any);
        if (small) return mk::thunk(mk::lam(x, mk::ret(mk::var(x))));
        return mk::thunk(mk::lam(x, comp(b - 2, inner, depth + 1)));
      }
      case 5:
        return mk::nat(rng_.below(std::min<std::size_t>(b - 2, 3) + 1));
      default:
        return mk::unit();
    }
  }

  std::vector<Option> options(const Scope& s, std::size_t b) const {
    std::vector<Option> o = {
        {Choice::Ret, Kind::Return, weight(Kind::Return, b > 8 ? 0.3 : 1.0), 2, false},
        {Choice::Let, Kind::Seq, weight(Kind::Seq, 3.0), 4, false},
        {Choice::AppLam, Kind::App, weight(Kind::App, 1.5), 5, false},
        {Choice::ForceThunk, Kind::Force, weight(Kind::Force, 1.0), 4, false},
        {Choice::PCase, Kind::PCase, weight(Kind::PCase, 1.0), 6, false},
        {Choice::Case, Kind::SCase, weight(Kind::SCase, 1.0), 7, false},
        {Choice::Prj, Kind::Prj, weight(Kind::Prj, 0.7), 6, false},
    };
    if (s.has(Shape::FnThunk)) o.push_back({Choice::AppForce, Kind::App, weight(Kind::App, 1.0), 4, false});
    if (s.has(Shape::Thunk)) o.push_back({Choice::ForceVar, Kind::Force, weight(Kind::Force, 1.0), 2, false});
    if (pure_) return o;
    switch (cfg_.calculus) {
      case Calculus::Del:
        o.push_back({Choice::Dollar, Kind::Dollar, weight(Kind::Dollar, 2.0), 5, true});
        if (s.delimited) o.push_back({Choice::Shift0, Kind::Shift0, weight(Kind::Shift0, 2.0), 3, true});
        if (!s.conts.empty()) o.push_back({Choice::Throw, Kind::Throw, weight(Kind::Throw, 3.0), 3, true});
        break;
      case Calculus::Eff:
        if (s.delimited) o.push_back({Choice::Op, Kind::OpCall, weight(Kind::OpCall, 2.0), 3, true});
        o.push_back({Choice::HandleC, Kind::Handle, weight(Kind::Handle, 1.0), 5 + 2 * cfg_.op_pool.size(), true});
        if (!s.conts.empty()) o.push_back({Choice::Throw, Kind::Throw, weight(Kind::Throw, 3.0), 3, true});
        break;
      case Calculus::Ref:
        o.push_back({Choice::Ref, Kind::RefCreate, weight(Kind::RefCreate, 2.0), 5, true});
        if (!s.refs.empty()) {
          o.push_back({Choice::Get, Kind::RefGet, weight(Kind::RefGet, 1.5), 2, true});
          o.push_back({Choice::Set, Kind::RefSet, weight(Kind::RefSet, 1.5), 3, true});
        }
        break;
      case Calculus::Ac:
        o.push_back({Choice::Create, Kind::Create, weight(Kind::Create, 2.0), 8, true});
        if (s.delimited) o.push_back({Choice::Yield, Kind::Yield, weight(Kind::Yield, 2.0), 2, true});
        if (!s.conts.empty()) o.push_back({Choice::Resume, Kind::Resume, weight(Kind::Resume, 2.0), 3, true});
        break;
      case Calculus::Mam:
        break;
    }
    return o;
  }

  Choice choose_comp(const Scope& s, std::size_t b) {
    std::vector<Option> opts = options(s, b);
    double mam = 0, control = 0;
    for (const auto& o : opts) {
      if (o.need > b) continue;
      (o.control ? control : mam) += o.weight;
    }
    double scale = 1.0;
    if (control > 0 && mam > 0 && cfg_.control_share > 0 && cfg_.control_share < 1) {
      scale = cfg_.control_share / (1 - cfg_.control_share) * mam / control;
    }
    struct W {
      int id;
      double w;
      std::size_t need;
    };
    std::vector<W> ws;
    for (const auto& o : opts) ws.push_back({static_cast<int>(o.choice), o.control ? o.weight * scale : o.weight, o.need});
    return static_cast<Choice>(choose(ws, b));
  }

  Term handler_around(std::size_t body_budget, std::size_t clause_extra, const Scope& s, std::size_t depth) {
    Handler h;
    h.ret_binder = fresh('x');
    Scope ret_scope = s;
    ret_scope.bind(h.ret_binder, Shape::Any);
    h.ret_body = mk::ret(mk::var(h.ret_binder));
    auto extra = split(clause_extra + cfg_.op_pool.size(), std::vector<std::size_t>(cfg_.op_pool.size(), 1));
    for (std::size_t i = 0; i < cfg_.op_pool.size(); ++i) {
      OpClause c;
      c.op = cfg_.op_pool[i];
      c.param = fresh('p');
      c.cont = fresh('k');
      Scope cs = s;
      cs.bind(c.param, Shape::Any);
      cs.conts.push_back(c.cont);
      c.body = comp(1 + extra[i], cs, depth + 1);
      h.ops.push_back(std::move(c));
    }
    Scope inner = s;
    inner.delimited = true;
    return mk::handle(std::move(h), comp(body_budget, inner, depth + 1));
  }

  // Budget for a value in operand position. Large literals here rarely get
  // inspected, so most of the budget is better spent on computations.
  std::size_t operand(std::size_t b) { return std::min<std::size_t>(b, 2 + rng_.below(4)); }

  Term comp(std::size_t b, const Scope& s, std::size_t depth) {
    if (b < 3 || depth >= cfg_.binder_depth_cap) return mk::ret(value(std::max<std::size_t>(b, 2) - 1, s, depth + 1));
    switch (choose_comp(s, b)) {
      case Choice::Ret:
        return mk::ret(value(operand(b - 1), s, depth + 1));
      case Choice::Let: {
        auto parts = split(b - 1, {2, 2});
        const std::string x = fresh('x');
        Term m = comp(parts[0], s, depth + 1);
        Scope s2 = s;
        s2.bind(x, m.kind() == Kind::Return ? shape_of(m.kid(0), s) : Shape::Any);
        return mk::seq(x, m, comp(parts[1], s2, depth + 1));
      }
      case Choice::AppLam: {
        auto parts = split(b - 2, {2, 1});
        const std::string x = fresh('x');
        Term arg = value(parts[1], s, depth + 1);
        Scope s2 = s;
        s2.bind(x, shape_of(arg, s));
        Term body = comp(parts[0], s2, depth + 1);
        return mk::app(mk::lam(x, body), arg);
      }
      case Choice::AppForce:
        return mk::app(mk::force(pick_var(s, Shape::FnThunk)), value(operand(b - 3), s, depth + 1));
      case Choice::ForceThunk:
        return mk::force(mk::thunk(comp(b - 2, s, depth + 1)));
      case Choice::ForceVar:
        return mk::force(pick_var(s, Shape::Thunk));
      case Choice::PCase: {
        auto parts = split(b - 1, {3, 2});
        Term scrut = value(parts[0], s, depth + 1, Shape::Pair);
        const std::string x = fresh('x'), y = fresh('x');
        Scope s2 = s;
        const bool lit = scrut.kind() == Kind::Pair;
        s2.bind(x, lit ? shape_of(scrut.kid(0), s) : Shape::Any);
        s2.bind(y, lit ? shape_of(scrut.kid(1), s) : Shape::Any);
        return mk::pcase(scrut, x, y, comp(parts[1], s2, depth + 1));
      }
      case Choice::Case: {
        auto parts = split(b - 1, {2, 2, 2});
        Term scrut = value(parts[0], s, depth + 1, Shape::Inj);
        std::vector<CaseClause> clauses;
        for (std::size_t i = 0; i < 2; ++i) {
          const std::string x = fresh('x');
          Scope s2 = s;
          const bool lit = scrut.kind() == Kind::Inj && scrut.name() == kTags[i];
          s2.bind(x, lit ? shape_of(scrut.kid(0), s) : Shape::Any);
          clauses.push_back({kTags[i], x, comp(parts[1 + i], s2, depth + 1)});
        }
        return mk::scase(scrut, std::move(clauses));
      }
      case Choice::Prj: {
        auto parts = split(b - 2, {2, 2});
        Term m = comp(parts[0], s, depth + 1);
        return mk::prj(1 + rng_.below(2), mk::cpair(m, comp(parts[1], s, depth + 1)));
      }
      case Choice::Dollar: {
        auto parts = split(b - 1, {2, 2});
        Scope inner = s;
        inner.delimited = true;
        Term m = comp(parts[0], inner, depth + 1);
        const std::string x = fresh('x');
        Scope s2 = s;
        s2.bind(x, Shape::Any);
        return mk::dollar(m, x, comp(parts[1], s2, depth + 1));
      }
      case Choice::Shift0: {
        const std::string k = fresh('k');
        Scope s2 = s;
        s2.conts.push_back(k);
        s2.delimited = false;
        return mk::shift0(k, comp(b - 1, s2, depth + 1));
      }
      case Choice::Throw:
        return mk::throw_(mk::var(pick(s.conts)), value(operand(b - 2), s, depth + 1));
      case Choice::Op:
        return mk::op_call(pick(cfg_.op_pool), value(operand(b - 1), s, depth + 1));
      case Choice::HandleC: {
        const std::size_t fixed = 3 + 2 * cfg_.op_pool.size();
        auto parts = split(b - fixed, {2, 0});
        return handler_around(parts[0], parts[1], s, depth);
      }
      case Choice::Ref: {
        auto parts = split(b - 2, {1, 2});
        const std::string r = fresh('r');
        Term init = value(parts[0], s, depth + 1);
        Scope s2 = s;
        s2.refs.push_back(r);
        return mk::seq(r, mk::ref_create(init), comp(parts[1], s2, depth + 1));
      }
      case Choice::Get:
        return mk::ref_get(mk::var(pick(s.refs)));
      case Choice::Set:
        return mk::ref_set(mk::var(pick(s.refs)), value(operand(b - 2), s, depth + 1));
      case Choice::Create: {
        auto parts = split(b - 4, {2, 2});
        const std::string c = fresh('c');
        Scope inner = s;
        inner.delimited = true;
        const std::string x = fresh('x');
        inner.bind(x, Shape::Any);
        Term body = comp(parts[0], inner, depth + 1);
        Scope s2 = s;
        s2.conts.push_back(c);
        return mk::seq(c, mk::create(mk::thunk(mk::lam(x, body))), comp(parts[1], s2, depth + 1));
      }
      case Choice::Resume:
        return mk::resume(mk::var(pick(s.conts)), value(operand(b - 2), s, depth + 1));
      case Choice::Yield:
        return mk::yield(value(operand(b - 1), s, depth + 1));
    }
    return mk::ret(mk::unit());
  }
};

}  // namespace

Term generate(const GenConfig& cfg, std::uint64_t index) { return Generator(cfg, index).program(); }

// ---------------------------------------------------------------------------
// Observations

Observation observe(const Term& v) {
  Observation o;
  switch (v.kind()) {
    case Kind::Unit:
      o.kind = Observation::Kind::Unit;
      break;
    case Kind::Pair:
      o.kind = Observation::Kind::Pair;
      o.kids = {observe(v.kid(0)), observe(v.kid(1))};
      break;
    case Kind::Inj:
      o.kind = Observation::Kind::Inj;
      o.tag = v.name();
      o.kids = {observe(v.kid(0))};
      break;
    default:
      o.kind = Observation::Kind::Opaque;
      break;
  }
  return o;
}

std::string to_string(const Observation& o) {
  switch (o.kind) {
    case Observation::Kind::Unit:
      return "()";
    case Observation::Kind::Pair:
      return "(pair " + to_string(o.kids[0]) + " " + to_string(o.kids[1]) + ")";
    case Observation::Kind::Inj:
      return "(inj " + o.tag + " " + to_string(o.kids[0]) + ")";
    case Observation::Kind::Opaque:
      return "<opaque>";
  }
  return "?";
}

bool observation_matches(const Observation& s, const Observation& t) {
  if (s.kind == Observation::Kind::Opaque) return true;
  if (s.kind != t.kind || s.tag != t.tag || s.kids.size() != t.kids.size()) return false;
  for (std::size_t i = 0; i < s.kids.size(); ++i) {
    if (!observation_matches(s.kids[i], t.kids[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Differential runs

std::string_view to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Agree: return "Agree";
    case Verdict::Kind::Disagree: return "Disagree";
    case Verdict::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// The number held by a counter cell, i.e. an entry shaped like the
// suspended refcell loop {λy. let q' = return y in (force f) S q'}.
std::optional<std::uint64_t> counter_value(const StoreEntry& e) {
  if (e.kind != EntryKind::AcVal || e.term.kind() != Kind::Thunk) return std::nullopt;
  const Term abs = e.term.kid(0);
  if (abs.kind() != Kind::Abs) return std::nullopt;
  const Term s = abs.scope_body(0);
  if (s.kind() != Kind::Seq || s.kid(0).kind() != Kind::Return) return std::nullopt;
  const Term call = s.scope_body(0);
  if (call.kind() != Kind::App || call.kid(0).kind() != Kind::App || call.kid(1).kind() != Kind::Var) {
    return std::nullopt;
  }
  if (call.kid(0).kid(0).kind() != Kind::Force) return std::nullopt;
  return as_nat(call.kid(0).kid(1));
}

bool uses_counters(TranslationId id) {
  return id == TranslationId::DelToAcCounter || id == TranslationId::EffToAc;
}

}  // namespace

Verdict diff_run(const Term& p, TranslationId id, std::uint64_t source_fuel, const FuelPolicy& policy,
                 const DiffOptions& options) {
  Verdict v;
  v.program_text = print_program(p);
  const Outcome src = evaluate(p, source_of(id), source_fuel);
  v.source = src.kind;
  v.source_steps = src.steps;
  if (src.kind == OutcomeKind::Value) v.source_obs = observe(src.value);
  if (src.kind == OutcomeKind::FuelExhausted) {
    v.kind = Verdict::Kind::Inconclusive;
    return v;
  }

  const Term target = translate(p, id);
  const Calculus tc = target_of(id);
  EvalOptions eo;
  eo.fuel = policy(src.steps);
  std::map<std::uint64_t, std::uint64_t> counters;
  const bool wf = options.check_wf && tc == Calculus::Ac;
  const bool mono = options.check_counters && uses_counters(id);
  if (wf || mono) {
    eo.observer = [&](const Config& cfg, const std::vector<StoreDelta>& delta) {
      if (v.invariant_violations.size() >= 8) return;
      if (wf) {
        if (auto w = ac_well_formed_after(cfg, delta)) {
          v.invariant_violations.push_back("well-formedness: #c" + std::to_string(w->label) + " " + w->clause);
        }
      }
      if (mono) {
        for (const auto& d : delta) {
          auto n = counter_value(d.after);
          if (!n) continue;
          auto [it, fresh] = counters.emplace(d.label.id, *n);
          if (!fresh && *n < it->second) {
            v.invariant_violations.push_back("counter #c" + std::to_string(d.label.id) + " decreased from " +
                                              std::to_string(it->second) + " to " + std::to_string(*n));
          }
          it->second = *n;
        }
      }
    };
  }
  const Outcome tgt = evaluate(target, tc, eo);
  v.target = tgt.kind;
  v.target_steps = tgt.steps;
  if (tgt.kind == OutcomeKind::Value) v.target_obs = observe(tgt.value);
  if (tgt.kind == OutcomeKind::FuelExhausted) {
    v.kind = Verdict::Kind::Inconclusive;
    v.target_fuel_side = true;
    return v;
  }
  bool agree = src.kind == tgt.kind;
  if (agree && src.kind == OutcomeKind::Value) agree = observation_matches(*v.source_obs, *v.target_obs);
  v.kind = agree ? Verdict::Kind::Agree : Verdict::Kind::Disagree;
  return v;
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

const char* const kOmega = "(app (lam x (app (force x) x)) (thunk (lam x (app (force x) x))))";

const char* const kMRef =
    "(let r (ref (inj A ())) (let i (get r) (let _ (set! r (inj B ())) (let k (get r) (return (pair i k))))))";

Observation obs_inj(const std::string& tag, Observation kid) {
  Observation o;
  o.kind = Observation::Kind::Inj;
  o.tag = tag;
  o.kids = {std::move(kid)};
  return o;
}

Observation obs_unit() {
  Observation o;
  o.kind = Observation::Kind::Unit;
  return o;
}

std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> out;
  auto add = [&](const char* name, Calculus c, const std::string& text, OutcomeKind k,
                 std::optional<Observation> obs = std::nullopt) {
    out.push_back(CorpusEntry{name, c, parse_program(text, c), k, std::move(obs)});
  };
  add("M_del", Calculus::Del,
      "(dollar (let j (shift0 k1 (let r1 (throw k1 (nat 10)) (let r2 (throw k1 (nat 20)) (return r1))))"
      " (shift0 k2 (return (nat 30)))) i (return i))",
      OutcomeKind::Bottom);
  Observation ab;
  ab.kind = Observation::Kind::Pair;
  ab.kids = {obs_inj("A", obs_unit()), obs_inj("B", obs_unit())};
  add("M_ref", Calculus::Ref, kMRef, OutcomeKind::Value, ab);
  const std::string omega = kOmega;
  add("L_ref", Calculus::Ref,
      std::string("(let r ") + kMRef + " (pcase r (a b) (case a (A u (case b (A w " + omega +
          ") (B w (return ())))) (B u " + omega + "))))",
      OutcomeKind::Value, obs_unit());
  add("double_throw_del", Calculus::Del,
      "(dollar (shift0 k (let a (throw k (nat 1)) (let b (throw k (nat 2)) (return (pair a b))))) x (return x))",
      OutcomeKind::Bottom);
  add("double_throw_eff", Calculus::Eff,
      "(handle (handler (ret x (return x)) (on E p k (let a (throw k (nat 1)) (let b (throw k (nat 2))"
      " (return (pair a b)))))) (op E ()))",
      OutcomeKind::Bottom);
  add("omega", Calculus::Mam, omega, OutcomeKind::FuelExhausted);
  return out;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = build_corpus();
  return c;
}

const CorpusEntry* corpus_entry(std::string_view name) {
  for (const auto& e : corpus()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Suites and reports

SuiteReport run_suite(GenConfig cfg, TranslationId id, const SuiteOptions& options) {
  cfg.calculus = source_of(id);
  SuiteReport r;
  r.translation = id;
  r.seed = cfg.seed;
  auto record = [&](std::uint64_t index, std::string seed, const Term& p) {
    SuiteItem item{index, std::move(seed), diff_run(p, id, options.source_fuel, options.policy, options.diff)};
    switch (item.verdict.kind) {
      case Verdict::Kind::Agree: ++r.agree; break;
      case Verdict::Kind::Disagree: ++r.disagree; break;
      case Verdict::Kind::Inconclusive: ++r.inconclusive; break;
    }
    if (!item.verdict.invariant_violations.empty()) ++r.invariant_failures;
    r.items.push_back(std::move(item));
  };
  for (std::uint64_t i = 0; i < options.count; ++i) {
    Term p = generate(cfg, i);
    record(i, std::to_string(cfg.seed), p);
    r.items.back().verdict.origin = "seed:" + std::to_string(cfg.seed) + "/" + std::to_string(i);
  }
  if (options.include_corpus) {
    std::uint64_t index = options.count;
    for (const auto& e : corpus()) {
      if (e.calculus != cfg.calculus) continue;
      record(index++, "corpus:" + e.name, e.program);
      r.items.back().verdict.origin = "corpus:" + e.name;
    }
  }
  return r;
}

namespace {

nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(v.kind);
  j["source_outcome"] = to_string(v.source);
  j["target_outcome"] = v.target ? nlohmann::ordered_json(std::string(to_string(*v.target)))
                                 : nlohmann::ordered_json(nullptr);
  j["source_steps"] = v.source_steps;
  j["target_steps"] = v.target_steps;
  if (v.source_obs) j["source_observation"] = to_string(*v.source_obs);
  if (v.target_obs) j["target_observation"] = to_string(*v.target_obs);
  if (v.kind == Verdict::Kind::Inconclusive) j["fuel_side"] = v.target_fuel_side ? "target" : "source";
  if (!v.invariant_violations.empty()) j["invariant_violations"] = v.invariant_violations;
  if (v.kind == Verdict::Kind::Disagree) {
    j["program_text"] = v.program_text;
    j["origin"] = v.origin;
  }
  return j;
}

}  // namespace

std::string verdict_to_json(const Verdict& v) { return verdict_json(v).dump(); }

std::string report_to_jsonl(const SuiteReport& r) {
  std::string out;
  for (const auto& item : r.items) {
    nlohmann::ordered_json j;
    j["index"] = item.index;
    j["seed"] = item.seed;
    const nlohmann::ordered_json v = verdict_json(item.verdict);
    for (const auto& [k, val] : v.items()) j[k] = val;
    out += j.dump();
    out += '\n';
  }
  nlohmann::ordered_json s;
  s["translation"] = to_string(r.translation);
  s["seed"] = r.seed;
  s["count"] = r.items.size();
  s["agree"] = r.agree;
  s["disagree"] = r.disagree;
  s["inconclusive"] = r.inconclusive;
  s["invariant_failures"] = r.invariant_failures;
  nlohmann::ordered_json wrapper;
  wrapper["summary"] = std::move(s);
  out += wrapper.dump();
  out += '\n';
  return out;
}

}  // namespace ctlcalc
