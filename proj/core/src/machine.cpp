#include "ctlcalc/machine.hpp"

#include <stdexcept>

#include "json.hpp"

namespace ctlcalc {

std::string_view to_string(EntryKind k) {
  switch (k) {
    case EntryKind::Nil: return "nil";
    case EntryKind::DelCont: return "del-cont";
    case EntryKind::EffCont: return "eff-cont";
    case EntryKind::AcVal: return "ac-value";
    case EntryKind::RefVal: return "ref-value";
  }
  return "?";
}

std::string to_string(const LabelKey& k) {
  static constexpr char kPrefix[] = {'d', 'c', 'e', 'r'};
  return std::string("#") + kPrefix[static_cast<std::size_t>(k.sort)] + std::to_string(k.id);
}

std::string_view to_string(StuckReason r) {
  switch (r) {
    case StuckReason::None: return "none";
    case StuckReason::ForeignConstructor: return "constructor not in calculus";
    case StuckReason::ShiftWithoutDollar: return "shift0 without enclosing dollar";
    case StuckReason::YieldWithoutLabeled: return "yield outside a running coroutine";
    case StuckReason::OpWithoutHandler: return "operation without enclosing handler";
    case StuckReason::UnhandledOp: return "nearest handler has no clause for operation";
    case StuckReason::NotAPair: return "pcase on a non-pair";
    case StuckReason::NotAnInjection: return "case on a non-injection";
    case StuckReason::NoMatchingClause: return "no case clause for tag";
    case StuckReason::NotAThunk: return "force of a non-thunk";
    case StuckReason::NotAFunction: return "application of a non-function";
    case StuckReason::NotAComputationPair: return "projection of a non-pair";
    case StuckReason::ReturnInApplication: return "return in function position";
    case StuckReason::ReturnInProjection: return "return under projection";
    case StuckReason::TerminalNonReturn: return "terminal computation is not a return";
    case StuckReason::NotALabel: return "expected a label of the right sort";
    case StuckReason::UnknownLabel: return "label not in store";
    case StuckReason::WrongEntry: return "store entry of the wrong kind";
    case StuckReason::FreeVariable: return "free variable";
  }
  return "?";
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return "Value";
    case OutcomeKind::Bottom: return "Bottom";
    case OutcomeKind::Stuck: return "Stuck";
    case OutcomeKind::FuelExhausted: return "FuelExhausted";
  }
  return "?";
}

const StoreEntry* Store::find(LabelKey k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

void Store::set(LabelKey k, StoreEntry e) {
  std::uint64_t& next = next_[static_cast<std::size_t>(k.sort)];
  if (k.id >= next) next = k.id + 1;
  entries_[k] = std::move(e);
}

Term fresh_label(Store& store, LabelSort sort, std::shared_ptr<const Handler> handler) {
  const std::uint64_t id = store.allocate(sort);
  if (sort == LabelSort::Eff) {
    if (!handler) throw std::invalid_argument("effect label without handler");
    return mk::eff_label(id, std::move(handler));
  }
  return mk::label(sort, id);
}

// ---------------------------------------------------------------------------
// Decomposition

bool is_pure_frame(const Term& frame) {
  const Kind k = frame.kind();
  return k == Kind::Seq || k == Kind::App || k == Kind::Prj;
}

Term plug(const std::vector<Term>& frames, Term hole) {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) hole = it->with_kid(0, std::move(hole));
  return hole;
}

namespace {

DecomposeResult no_redex(StuckReason r) {
  DecomposeResult d{DecomposeResult::Kind::NoRedex, {}, {}, r};
  return d;
}

DecomposeResult redex(std::vector<Term> frames, Term r) {
  DecomposeResult d{DecomposeResult::Kind::Redex, {}, {}, StuckReason::None};
  d.decomposition.frames = std::move(frames);
  d.decomposition.redex = std::move(r);
  return d;
}

Kind delimiter_for(Kind control) {
  switch (control) {
    case Kind::Shift0: return Kind::Dollar;
    case Kind::Yield: return Kind::Labeled;
    default: return Kind::Handle;
  }
}

StuckReason missing_delimiter(Kind control) {
  switch (control) {
    case Kind::Shift0: return StuckReason::ShiftWithoutDollar;
    case Kind::Yield: return StuckReason::YieldWithoutLabeled;
    default: return StuckReason::OpWithoutHandler;
  }
}

bool handles(const Term& handle_node, const std::string& op) {
  const auto& tags = handle_node.tags();
  return std::find(tags.begin(), tags.end(), op) != tags.end();
}

}  // namespace

DecomposeResult decompose(const Term& c, Calculus calculus) {
  std::vector<Term> frames;
  Term cur = c;
  for (;;) {
    const Kind k = cur.kind();
    if (!kind_in_calculus(k, calculus)) return no_redex(StuckReason::ForeignConstructor);
    switch (k) {
      case Kind::Seq:
      case Kind::Dollar:
      case Kind::Handle:
      case Kind::Labeled:
        if (cur.kid(0).kind() == Kind::Return) return redex(std::move(frames), cur);
        break;
      case Kind::App:
        if (cur.kid(0).kind() == Kind::Abs) return redex(std::move(frames), cur);
        break;
      case Kind::Prj:
        if (cur.kid(0).kind() == Kind::CPair) return redex(std::move(frames), cur);
        break;
      case Kind::Shift0:
      case Kind::Yield:
      case Kind::OpCall: {
        std::size_t j = frames.size();
        while (j > 0 && is_pure_frame(frames[j - 1])) --j;
        if (j == 0 || frames[j - 1].kind() != delimiter_for(k)) return no_redex(missing_delimiter(k));
        if (k == Kind::OpCall && !handles(frames[j - 1], cur.name())) return no_redex(StuckReason::UnhandledOp);
        DecomposeResult d{DecomposeResult::Kind::Redex, {}, {}, StuckReason::None};
        d.decomposition.redex = frames[j - 1];
        d.decomposition.inner.assign(frames.begin() + static_cast<std::ptrdiff_t>(j), frames.end());
        frames.resize(j - 1);
        d.decomposition.frames = std::move(frames);
        d.decomposition.control = cur;
        return d;
      }
      case Kind::Return:
        if (frames.empty()) {
          DecomposeResult d{DecomposeResult::Kind::Terminal, {}, cur.kid(0), StuckReason::None};
          return d;
        }
        return no_redex(frames.back().kind() == Kind::App ? StuckReason::ReturnInApplication
                                                          : StuckReason::ReturnInProjection);
      case Kind::Abs:
      case Kind::CPair:
        if (frames.empty()) return no_redex(StuckReason::TerminalNonReturn);
        if (frames.back().kind() == Kind::App) return no_redex(StuckReason::NotAFunction);
        if (frames.back().kind() == Kind::Prj) return no_redex(StuckReason::NotAComputationPair);
        return no_redex(StuckReason::TerminalNonReturn);
      default:
        return redex(std::move(frames), cur);
    }
    frames.push_back(cur);
    cur = cur.kid(0);
  }
}

// ---------------------------------------------------------------------------
// Rules

namespace {

struct Applied {
  std::string rule;
  std::vector<StoreDelta> delta;
  StuckReason stuck = StuckReason::None;
};

class Rules {
 public:
  Rules(Config& cfg, const Decomposition& d, Applied& out) : cfg_(cfg), d_(d), out_(out) {}

  void apply() {
    const Term& r = d_.redex;
    switch (r.kind()) {
      case Kind::Seq:
        done("let", substitute(r.scope_body(0), r.binders(0)[0], r.kid(0).kid(0)));
        return;
      case Kind::App: {
        const Term f = r.kid(0);
        done("app", substitute(f.scope_body(0), f.binders(0)[0], r.kid(1)));
        return;
      }
      case Kind::Prj:
        done("prj", r.kid(0).kid(r.index() - 1));
        return;
      case Kind::PCase: {
        const Term v = r.kid(0);
        if (v.kind() != Kind::Pair) return stuck(value_reason(v, StuckReason::NotAPair));
        const auto& xs = r.binders(0);
        Bindings b;
        b.emplace(xs[0], v.kid(0));
        b[xs[1]] = v.kid(1);  // with x1 == x2 the second component wins
        done("pcase", substitute(r.scope_body(0), b));
        return;
      }
      case Kind::SCase: {
        const Term v = r.kid(0);
        if (v.kind() != Kind::Inj) return stuck(value_reason(v, StuckReason::NotAnInjection));
        const auto& tags = r.tags();
        auto it = std::find(tags.begin(), tags.end(), v.name());
        if (it == tags.end()) return stuck(StuckReason::NoMatchingClause);
        const auto i = static_cast<std::size_t>(it - tags.begin());
        done("case", substitute(r.scope_body(i), r.binders(i)[0], v.kid(0)));
        return;
      }
      case Kind::Force: {
        const Term v = r.kid(0);
        if (v.kind() != Kind::Thunk) return stuck(value_reason(v, StuckReason::NotAThunk));
        done("force", v.kid(0));
        return;
      }
      case Kind::Dollar:
        if (d_.control.empty()) {
          done("ret", substitute(r.scope_body(0), r.binders(0)[0], r.kid(0).kid(0)));
        } else {
          shift();
        }
        return;
      case Kind::Handle:
        if (d_.control.empty()) {
          done("ret", substitute(r.scope_body(0), r.binders(0)[0], r.kid(0).kid(0)));
        } else {
          op();
        }
        return;
      case Kind::Labeled:
        if (d_.control.empty()) {
          done("ret", r.kid(0));
        } else {
          yield();
        }
        return;
      case Kind::Throw:
        throw_();
        return;
      case Kind::Create: {
        Term l = fresh_label(cfg_.store, LabelSort::Ac);
        write({LabelSort::Ac, l.index()}, {EntryKind::AcVal, r.kid(0)});
        done("create", mk::ret(l));
        return;
      }
      case Kind::Resume:
        resume();
        return;
      case Kind::RefCreate: {
        Term l = fresh_label(cfg_.store, LabelSort::Ref);
        write({LabelSort::Ref, l.index()}, {EntryKind::RefVal, r.kid(0)});
        done("ref", mk::ret(l));
        return;
      }
      case Kind::RefSet:
      case Kind::RefGet: {
        const Term v = r.kid(0);
        if (v.kind() != Kind::RefCell) return stuck(value_reason(v, StuckReason::NotALabel));
        const LabelKey key{LabelSort::Ref, v.index()};
        const StoreEntry* e = cfg_.store.find(key);
        if (e == nullptr) return stuck(StuckReason::UnknownLabel);
        if (e->kind != EntryKind::RefVal) return stuck(StuckReason::WrongEntry);
        if (r.kind() == Kind::RefGet) {
          done("get", mk::ret(e->term));
        } else {
          write(key, {EntryKind::RefVal, r.kid(1)});
          done("set", mk::ret(mk::unit()));
        }
        return;
      }
      default:
        stuck(StuckReason::ForeignConstructor);
        return;
    }
  }

 private:
  Config& cfg_;
  const Decomposition& d_;
  Applied& out_;

  static StuckReason value_reason(const Term& v, StuckReason otherwise) {
    return v.kind() == Kind::Var ? StuckReason::FreeVariable : otherwise;
  }

  void stuck(StuckReason r) { out_.stuck = r; }

  void done(const char* rule, Term contractum) {
    out_.rule = rule;
    cfg_.comp = plug(d_.frames, std::move(contractum));
  }

  void fail() {
    out_.rule = "fail";
    cfg_ = Config::error();
  }

  void write(LabelKey k, StoreEntry e) {
    const StoreEntry* before = cfg_.store.find(k);
    out_.delta.push_back(StoreDelta{k, before ? std::optional<StoreEntry>(*before) : std::nullopt, e});
    cfg_.store.set(k, std::move(e));
  }

  // Binder for a stored continuation; the hole is never under a binder of a
  // pure frame, so only free names of the context have to be avoided.
  static std::string hole_binder(const Term& context) { return fresh_name("y", free_vars(context)); }

  Term reinstate(const std::string& y) const {
    return d_.redex.with_kid(0, plug(d_.inner, mk::ret(mk::var(y))));
  }

  void shift() {
    const Term& s = d_.control;
    const std::string y = hole_binder(d_.redex);
    Term l = fresh_label(cfg_.store, LabelSort::Del);
    write({LabelSort::Del, l.index()}, {EntryKind::DelCont, mk::lam(y, reinstate(y))});
    done("shift", substitute(s.scope_body(0), s.binders(0)[0], l));
  }

  void op() {
    const Term& call = d_.control;
    auto h = std::make_shared<const Handler>(d_.redex.handler());
    const OpClause* clause = h->find(call.name());
    const std::string y = hole_binder(d_.redex);
    Term l = fresh_label(cfg_.store, LabelSort::Eff, h);
    write({LabelSort::Eff, l.index()}, {EntryKind::EffCont, mk::lam(y, reinstate(y))});
    Bindings b;
    b.emplace(clause->param, call.kid(0));
    b[clause->cont] = l;
    done("op", substitute(clause->body, b));
  }

  void yield() {
    const Term& y_node = d_.control;
    const std::string y = fresh_name("y", free_vars(plug(d_.inner, y_node)));
    const LabelKey key{LabelSort::Ac, d_.redex.index()};
    write(key, {EntryKind::AcVal, mk::thunk(mk::lam(y, plug(d_.inner, mk::ret(mk::var(y)))))});
    done("yield", mk::ret(y_node.kid(0)));
  }

  void throw_() {
    const Term& r = d_.redex;
    const Term v = r.kid(0);
    LabelSort sort = LabelSort::Del;
    EntryKind want = EntryKind::DelCont;
    if (v.kind() == Kind::EffLabel) {
      sort = LabelSort::Eff;
      want = EntryKind::EffCont;
    } else if (v.kind() != Kind::DelLabel) {
      return stuck(value_reason(v, StuckReason::NotALabel));
    }
    const LabelKey key{sort, v.index()};
    const StoreEntry* e = cfg_.store.find(key);
    if (e == nullptr) return stuck(StuckReason::UnknownLabel);
    if (e->kind == EntryKind::Nil) return fail();
    if (e->kind != want) return stuck(StuckReason::WrongEntry);
    const Term k = e->term;
    write(key, StoreEntry::nil());
    done("throw", substitute(k.scope_body(0), k.binders(0)[0], r.kid(1)));
  }

  void resume() {
    const Term& r = d_.redex;
    const Term v = r.kid(0);
    if (v.kind() != Kind::AcLabel) return stuck(value_reason(v, StuckReason::NotALabel));
    const LabelKey key{LabelSort::Ac, v.index()};
    const StoreEntry* e = cfg_.store.find(key);
    if (e == nullptr) return stuck(StuckReason::UnknownLabel);
    if (e->kind == EntryKind::Nil) return fail();
    if (e->kind != EntryKind::AcVal) return stuck(StuckReason::WrongEntry);
    const Term body = e->term;
    write(key, StoreEntry::nil());
    done("resume", mk::labeled(v.index(), mk::app(mk::force(body), r.kid(1))));
  }
};

bool apply(Config& cfg, const Decomposition& d, Applied& out) {
  Rules(cfg, d, out).apply();
  return out.stuck == StuckReason::None;
}

}  // namespace

StepResult step(const Config& cfg, Calculus calculus) {
  if (cfg.bottom) throw std::invalid_argument("step from the error configuration");
  StepResult res{StepResult::Kind::Stepped, cfg, {}, {}, {}, StuckReason::None};
  DecomposeResult d = decompose(cfg.comp, calculus);
  if (d.kind == DecomposeResult::Kind::Terminal) {
    res.kind = StepResult::Kind::Terminal;
    res.value = d.value;
    return res;
  }
  if (d.kind == DecomposeResult::Kind::NoRedex) {
    res.kind = StepResult::Kind::Stuck;
    res.reason = d.reason;
    return res;
  }
  Applied a;
  if (!apply(res.next, d.decomposition, a)) {
    res.kind = StepResult::Kind::Stuck;
    res.reason = a.stuck;
    res.next = cfg;
    return res;
  }
  res.rule = std::move(a.rule);
  res.delta = std::move(a.delta);
  return res;
}

Outcome run(Config cfg, Calculus calculus, const EvalOptions& options) {
  Outcome o;
  if (options.observer) options.observer(cfg, {});
  for (;;) {
    DecomposeResult d = decompose(cfg.comp, calculus);
    if (d.kind == DecomposeResult::Kind::Terminal) {
      o.kind = OutcomeKind::Value;
      o.value = d.value;
      break;
    }
    if (d.kind == DecomposeResult::Kind::NoRedex) {
      o.kind = OutcomeKind::Stuck;
      o.reason = d.reason;
      break;
    }
    if (o.steps >= options.fuel) {
      o.kind = OutcomeKind::FuelExhausted;
      break;
    }
    Applied a;
    if (!apply(cfg, d.decomposition, a)) {
      o.kind = OutcomeKind::Stuck;
      o.reason = a.stuck;
      break;
    }
    ++o.steps;
    if (options.observer) options.observer(cfg, a.delta);
    if (options.trace) {
      if (o.trace.size() < options.max_trace) {
        o.trace.push_back(TraceEntry{o.steps, std::move(a.rule), cfg.comp, std::move(a.delta)});
      } else {
        o.trace_truncated = true;
      }
    }
    if (cfg.bottom) {
      o.kind = OutcomeKind::Bottom;
      break;
    }
  }
  o.final = std::move(cfg);
  return o;
}

Outcome evaluate(const Term& p, Calculus calculus, const EvalOptions& options) {
  if (auto v = check_calculus(p, calculus, true)) {
    throw std::invalid_argument("not a " + std::string(to_string(calculus)) + " program: " + v->reason);
  }
  return run(Config::running(p), calculus, options);
}

Outcome evaluate(const Term& p, Calculus calculus, std::uint64_t fuel, bool want_trace) {
  EvalOptions o;
  o.fuel = fuel;
  o.trace = want_trace;
  return evaluate(p, calculus, o);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void collect_active(const Term& t, std::set<std::uint64_t>& out) {
  if (!t.has_active()) return;
  if (t.kind() == Kind::Labeled) out.insert(t.index());
  for (std::size_t i = 0; i < t.num_kids(); ++i) collect_active(t.kid(i), out);
  for (std::size_t i = 0; i < t.num_scopes(); ++i) collect_active(t.scope_body(i), out);
}

std::uint64_t some_active(const Term& t) {
  std::set<std::uint64_t> s;
  collect_active(t, s);
  return *s.begin();
}

std::optional<WfViolation> wf(const Term& m) {
  Term cur = m;
  for (;;) {
    switch (cur.kind()) {
      case Kind::Seq:
        if (cur.scope_body(0).has_active()) {
          return WfViolation{some_active(cur.scope_body(0)), "activeLabels(N) = {} for let"};
        }
        break;
      case Kind::App:
        if (cur.kid(1).has_active()) return WfViolation{some_active(cur.kid(1)), "activeLabels(V) = {} for app"};
        break;
      case Kind::Prj:
        break;
      case Kind::Labeled:
        if (cur.kid(0).has_active() && active_labels(cur.kid(0)).count(cur.index()) != 0) {
          return WfViolation{cur.index(), "l not in activeLabels(M)"};
        }
        break;
      default:
        if (cur.has_active()) {
          return WfViolation{some_active(cur), "no active labels under " + std::string(to_string(cur.kind()))};
        }
        return std::nullopt;
    }
    cur = cur.kid(0);
  }
}

}  // namespace

std::set<std::uint64_t> active_labels(const Term& t) {
  std::set<std::uint64_t> out;
  collect_active(t, out);
  return out;
}

namespace {

std::optional<WfViolation> stored_active(const LabelKey& k, const StoreEntry& e) {
  if (!e.term.empty() && e.term.has_active()) {
    return WfViolation{k.id, "stored value of " + to_string(k) + " has active labels"};
  }
  return std::nullopt;
}

std::optional<WfViolation> active_are_nil(const Config& cfg) {
  for (std::uint64_t l : active_labels(cfg.comp)) {
    const StoreEntry* e = cfg.store.find({LabelSort::Ac, l});
    if (e == nullptr || e->kind != EntryKind::Nil) return WfViolation{l, "theta(l) = nil for active l"};
  }
  return std::nullopt;
}

}  // namespace

std::optional<WfViolation> ac_well_formed_after(const Config& cfg, const std::vector<StoreDelta>& delta) {
  if (cfg.bottom) return std::nullopt;
  if (auto v = wf(cfg.comp)) return v;
  for (const auto& d : delta) {
    if (auto v = stored_active(d.label, d.after)) return v;
  }
  return active_are_nil(cfg);
}

std::optional<WfViolation> ac_well_formed(const Config& cfg) {
  if (cfg.bottom) return std::nullopt;
  if (auto v = wf(cfg.comp)) return v;
  for (const auto& [k, e] : cfg.store.entries()) {
    if (auto v = stored_active(k, e)) return v;
  }
  return active_are_nil(cfg);
}

// ---------------------------------------------------------------------------
// Handler completion

namespace {

void collect_ops(const Term& t, std::set<std::string>& out) {
  if (t.kind() == Kind::OpCall) out.insert(t.name());
  if (t.kind() == Kind::Handle) out.insert(t.tags().begin(), t.tags().end());
  for (std::size_t i = 0; i < t.num_kids(); ++i) collect_ops(t.kid(i), out);
  for (std::size_t i = 0; i < t.num_scopes(); ++i) collect_ops(t.scope_body(i), out);
}

Term complete(const Term& t, const std::set<std::string>& ops) {
  if (t.is_value() && t.num_kids() == 0) return t;
  std::vector<Term> kids;
  for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(complete(t.kid(i), ops));
  if (t.kind() == Kind::Handle) {
    Handler h = t.handler();
    h.ret_body = complete(h.ret_body, ops);
    for (auto& c : h.ops) c.body = complete(c.body, ops);
    for (const auto& op : ops) {
      if (h.find(op) != nullptr) continue;
      h.ops.push_back(OpClause{op, "p", "k",
                               mk::seq("r", mk::op_call(op, mk::var("p")), mk::throw_(mk::var("k"), mk::var("r")))});
    }
    return mk::handle(std::move(h), kids[0]);
  }
  std::vector<Term> bodies;
  std::vector<std::vector<std::string>> binders;
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    bodies.push_back(complete(t.scope_body(i), ops));
    binders.push_back(t.binders(i));
  }
  return rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
}

std::string entry_text(const StoreEntry& e) {
  return e.kind == EntryKind::Nil ? "nil" : std::string(to_string(e.kind)) + " " + pretty(e.term);
}

}  // namespace

Term forward_ops(const Term& t) {
  std::set<std::string> ops;
  collect_ops(t, ops);
  if (ops.empty()) return t;
  return complete(t, ops);
}

std::string trace_to_jsonl(const Outcome& o) {
  std::string out;
  for (const auto& e : o.trace) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["rule"] = e.rule;
    j["computation"] = e.comp.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(pretty(e.comp));
    auto delta = nlohmann::ordered_json::array();
    for (const auto& d : e.delta) {
      nlohmann::ordered_json r;
      r["label"] = to_string(d.label);
      r["before"] = d.before ? nlohmann::ordered_json(entry_text(*d.before)) : nlohmann::ordered_json(nullptr);
      r["after"] = entry_text(d.after);
      delta.push_back(std::move(r));
    }
    j["store_delta"] = std::move(delta);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace ctlcalc
