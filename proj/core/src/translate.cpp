#include "ctlcalc/translate.hpp"

#include <array>
#include <functional>
#include <map>

namespace ctlcalc {

namespace {

constexpr std::array<std::string_view, 6> kTranslationNames = {
    "del_to_ac_naive", "del_to_ac_counter", "eff_to_del", "del_to_eff", "ref_to_ac", "eff_to_ac"};

constexpr std::array<std::string_view, 10> kHelperNames = {"fail", "zero", "succ", "incr", "compare",
                                                           "cmp",  "ref",  "th",   "get",  "set"};

using namespace mk;

Term v(const char* n) { return var(n); }

// Self-application fixed point {(λx. (force g) {(force x) x}) {λx. (force g) {(force x) x}}}.
Term fix(const Term& g) {
  Term half = lam("x", app(force(g), thunk(app(force(v("x")), v("x")))));
  return thunk(app(half, thunk(half)));
}

Term build_cmp() {
  Term t = inj("True", unit());
  Term f = inj("False", unit());
  Term on_zero = scase(v("m"), {{"Zero", "_", ret(t)}, {"Succ", "_", ret(f)}});
  Term on_succ = scase(v("m"), {{"Zero", "_", ret(f)}, {"Succ", "m'", app(app(force(v("f")), v("n'")), v("m'"))}});
  return thunk(lam("f", lam("n", lam("m", scase(v("n"), {{"Zero", "_", on_zero}, {"Succ", "n'", on_succ}})))));
}

Term build_th() {
  Term set_arm = seq("q'", yield(unit()), app(app(force(v("f")), v("v")), v("q'")));
  Term get_arm = seq("q'", yield(v("s")), app(app(force(v("f")), v("s")), v("q'")));
  return thunk(lam("f", lam("s", lam("q", scase(v("q"), {{"Set", "v", set_arm}, {"Get", "_", get_arm}})))));
}

struct Helpers {
  Term cmp = build_cmp();
  Term th = build_th();
  Term compare = fix(cmp);
  Term th_fix = fix(th);
  Term incr = thunk(lam("n", ret(inj("Succ", v("n")))));
  Term get = thunk(lam("c", resume(v("c"), inj("Get", unit()))));
  Term set = thunk(lam("c", lam("v", resume(v("c"), inj("Set", v("v"))))));
  Term fail = thunk(seq("z", create(thunk(lam("_", ret(unit())))),
                        seq("_", resume(v("z"), unit()), resume(v("z"), unit()))));
  Term ref;

  Helpers() { ref = thunk(lam("v", create(cell(v("v"), "y", "q'")))); }

  Term cell(const Term& value, const std::string& y, const std::string& q) const {
    return thunk(lam(y, seq(q, ret(var(y)), app(app(force(th_fix), value), var(q)))));
  }
};

const Helpers& helpers() {
  static const Helpers h;
  return h;
}

Term child(const Term& t, std::size_t i) {
  return i < t.num_kids() ? t.kid(i) : t.scope_body(i - t.num_kids());
}

std::size_t num_children(const Term& t) { return t.num_kids() + t.num_scopes(); }

using Hole = std::function<Term(std::size_t)>;

struct Fresh {
  const std::set<std::string>& avoid;
  std::string operator()(const char* base) const { return fresh_name(base, avoid); }
};

bool is_stage(TranslationId id) { return id != TranslationId::EffToAc; }

// The fixed template of `n` under a single-stage translation, with
// `h(i)` in place of the i-th child.
Term instantiate(TranslationId stage, const Term& n, const Hole& h, const Fresh& fresh) {
  const Helpers& H = helpers();
  switch (stage) {
    case TranslationId::DelToAcNaive:
    case TranslationId::DelToAcCounter: {
      const bool counter = stage == TranslationId::DelToAcCounter;
      switch (n.kind()) {
        case Kind::Shift0:
          return yield(thunk(lam(n.binders(0)[0], h(0))));
        case Kind::Dollar: {
          const std::string z = fresh("z"), zc = fresh("zc"), res = fresh("res"), u = fresh("_");
          Term body = thunk(lam(u, seq(n.binders(0)[0], h(0), ret(thunk(lam(u, h(1)))))));
          Term go = counter ? app(force(var(res)), pair(pair(var(z), var(zc)), nat(0)))
                            : app(force(var(res)), var(z));
          Term run = seq(res, resume(var(z), unit()), go);
          if (counter) run = seq(zc, app(force(H.ref), nat(0)), run);
          return seq(z, create(body), run);
        }
        case Kind::Throw: {
          const std::string res = fresh("res");
          if (!counter) return seq(res, resume(h(0), h(1)), app(force(var(res)), h(0)));
          const std::string p = fresh("p"), i = fresh("i"), z = fresh("z"), zc = fresh("zc"), j = fresh("j"),
                            b = fresh("b"), i2 = fresh("i'"), u = fresh("_");
          Term ok = seq(i2, app(force(H.incr), var(i)),
                        seq(u, app(app(force(H.set), var(zc)), var(i2)),
                            seq(res, resume(var(z), h(1)),
                                app(force(var(res)), pair(pair(var(z), var(zc)), var(i2))))));
          Term test = scase(var(b), {{"True", u, ok}, {"False", u, force(H.fail)}});
          Term body = seq(j, app(force(H.get), var(zc)),
                          seq(b, app(app(force(H.compare), var(i)), var(j)), test));
          return pcase(h(0), p, i, pcase(var(p), z, zc, body));
        }
        default:
          break;
      }
      break;
    }
    case TranslationId::EffToDel:
      switch (n.kind()) {
        case Kind::OpCall: {
          const std::string k = fresh("k"), hh = fresh("h"), y = fresh("y");
          Term resume_k = thunk(lam(y, app(throw_(var(k), var(y)), var(hh))));
          return shift0(k, lam(hh, app(force(var(hh)), inj(n.name(), pair(h(0), resume_k)))));
        }
        case Kind::Throw:
          return app(force(h(0)), h(1));
        case Kind::Handle: {
          const std::string u = fresh("_"), c = fresh("c"), w = fresh("w");
          std::vector<CaseClause> arms;
          const auto& ops = n.tags();
          for (std::size_t i = 0; i < ops.size(); ++i) {
            const auto& bs = n.binders(i + 1);
            arms.push_back({ops[i], w, pcase(var(w), bs[0], bs[1], h(2 + i))});
          }
          Term dispatch = thunk(lam(c, scase(var(c), std::move(arms))));
          return app(dollar(h(0), n.binders(0)[0], lam(u, h(1))), dispatch);
        }
        default:
          break;
      }
      break;
    case TranslationId::DelToEff:
      switch (n.kind()) {
        case Kind::Shift0:
          return op_call("shift0", thunk(lam(n.binders(0)[0], h(0))));
        case Kind::Throw:
          return throw_(h(0), h(1));
        case Kind::Dollar: {
          const std::string p = fresh("p"), k = fresh("k");
          Handler hd;
          hd.ret_binder = n.binders(0)[0];
          hd.ret_body = h(1);
          hd.ops.push_back(OpClause{"shift0", p, k, app(force(var(p)), var(k))});
          return handle(std::move(hd), h(0));
        }
        default:
          break;
      }
      break;
    case TranslationId::RefToAc:
      switch (n.kind()) {
        case Kind::RefCreate:
          return create(H.cell(h(0), fresh("y"), fresh("q'")));
        case Kind::RefSet:
          return resume(h(0), inj("Set", h(1)));
        case Kind::RefGet:
          return resume(h(0), inj("Get", unit()));
        default:
          break;
      }
      break;
    case TranslationId::EffToAc:
      break;
  }
  throw TranslationError("no template for " + std::string(to_string(n.kind())) + " under " +
                         std::string(to_string(stage)));
}

class Translator {
 public:
  Translator(TranslationId stage, std::set<std::string> avoid) : stage_(stage), avoid_(std::move(avoid)) {}

  Term tr(const Term& t) const {
    const Kind k = t.kind();
    if (is_label_kind(k) || k == Kind::Labeled) {
      throw TranslationError("runtime labels have no translation");
    }
    if (!kind_in_calculus(k, source_of(stage_))) {
      throw TranslationError(std::string(to_string(k)) + " is not a " + std::string(to_string(source_of(stage_))) +
                             " constructor");
    }
    if (is_mam_kind(k)) {
      if (num_children(t) == 0) return t;
      std::vector<Term> kids;
      for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(tr(t.kid(i)));
      std::vector<Term> bodies;
      std::vector<std::vector<std::string>> binders;
      for (std::size_t i = 0; i < t.num_scopes(); ++i) {
        bodies.push_back(tr(t.scope_body(i)));
        binders.push_back(t.binders(i));
      }
      return rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
    }
    return instantiate(stage_, t, [&](std::size_t i) { return tr(child(t, i)); }, Fresh{avoid_});
  }

 private:
  TranslationId stage_;
  std::set<std::string> avoid_;
};

Term run_stage(TranslationId stage, const Term& t, const std::set<std::string>& extra) {
  std::set<std::string> avoid = all_names(t);
  avoid.insert(extra.begin(), extra.end());
  return Translator(stage, std::move(avoid)).tr(t);
}

bool uses_op(const Term& t, std::string_view op) {
  if (t.kind() == Kind::OpCall && t.name() == op) return true;
  for (std::size_t i = 0; i < num_children(t); ++i) {
    if (uses_op(child(t, i), op)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(TranslationId id) { return kTranslationNames[static_cast<std::size_t>(id)]; }

std::optional<TranslationId> parse_translation(std::string_view name) {
  for (std::size_t i = 0; i < kTranslationNames.size(); ++i) {
    if (kTranslationNames[i] == name) return static_cast<TranslationId>(i);
  }
  return std::nullopt;
}

const std::vector<TranslationId>& all_translations() {
  static const std::vector<TranslationId> ids = {TranslationId::DelToAcNaive, TranslationId::DelToAcCounter,
                                                 TranslationId::EffToDel,     TranslationId::DelToEff,
                                                 TranslationId::RefToAc,      TranslationId::EffToAc};
  return ids;
}

Calculus source_of(TranslationId id) {
  switch (id) {
    case TranslationId::DelToAcNaive:
    case TranslationId::DelToAcCounter:
    case TranslationId::DelToEff:
      return Calculus::Del;
    case TranslationId::EffToDel:
    case TranslationId::EffToAc:
      return Calculus::Eff;
    case TranslationId::RefToAc:
      return Calculus::Ref;
  }
  return Calculus::Mam;
}

Calculus target_of(TranslationId id) {
  switch (id) {
    case TranslationId::EffToDel:
      return Calculus::Del;
    case TranslationId::DelToEff:
      return Calculus::Eff;
    default:
      return Calculus::Ac;
  }
}

Term translate_term(const Term& t, TranslationId id, const std::set<std::string>& avoid) {
  if (id == TranslationId::EffToAc) {
    Term mid = run_stage(TranslationId::EffToDel, t, avoid);
    return run_stage(TranslationId::DelToAcCounter, mid, avoid);
  }
  return run_stage(id, t, avoid);
}

Term translate(const Term& p, TranslationId id) {
  if (id == TranslationId::DelToEff && uses_op(p, "shift0")) {
    throw TranslationError("operation name shift0 is reserved by del_to_eff");
  }
  if (auto v = check_calculus(p, source_of(id), true)) {
    throw TranslationError("not a " + std::string(to_string(source_of(id))) + " program: " + v->reason);
  }
  return translate_term(p, id);
}

// ---------------------------------------------------------------------------
// Helpers

std::string_view to_string(HelperName h) { return kHelperNames[static_cast<std::size_t>(h)]; }

std::optional<HelperName> parse_helper(std::string_view name) {
  for (std::size_t i = 0; i < kHelperNames.size(); ++i) {
    if (kHelperNames[i] == name) return static_cast<HelperName>(i);
  }
  return std::nullopt;
}

Term emit_helper(HelperName h) {
  const Helpers& H = helpers();
  switch (h) {
    case HelperName::Fail: return H.fail;
    case HelperName::Zero: return mk::nat(0);
    case HelperName::Succ: return H.incr;
    case HelperName::Incr: return H.incr;
    case HelperName::Compare: return H.compare;
    case HelperName::Cmp: return H.cmp;
    case HelperName::Ref: return H.ref;
    case HelperName::Th: return H.th;
    case HelperName::Get: return H.get;
    case HelperName::Set: return H.set;
  }
  throw std::invalid_argument("unknown helper");
}

Term emit_helper(std::string_view name) {
  if (name == "refcell") throw std::invalid_argument("refcell needs its initial value; use refcell(v)");
  auto h = parse_helper(name);
  if (!h) throw std::invalid_argument("unknown helper " + std::string(name));
  return emit_helper(*h);
}

Term refcell(const Term& value) {
  const std::set<std::string> avoid = free_vars(value);
  return helpers().cell(value, fresh_name("y", avoid), fresh_name("q'", avoid));
}

RefcellRun refcell_behaviour_check(const Term& v0, const std::vector<RefcellOp>& ops, std::uint64_t fuel) {
  const Helpers& H = helpers();
  // Results are collected right to left into a nested pair list.
  Term result = mk::ret(mk::unit());
  std::size_t gets = 0;
  for (const auto& op : ops) gets += op.is_set ? 0 : 1;
  {
    Term list = mk::unit();
    for (std::size_t i = gets; i-- > 0;) list = mk::pair(mk::var("g" + std::to_string(i)), list);
    result = mk::ret(list);
  }
  Term body = result;
  std::size_t g = gets;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    if (it->is_set) {
      body = mk::seq("_", mk::app(mk::app(mk::force(H.set), mk::var("c")), it->value), body);
    } else {
      body = mk::seq("g" + std::to_string(--g), mk::app(mk::force(H.get), mk::var("c")), body);
    }
  }
  Term program = mk::seq("c", mk::app(mk::force(H.ref), v0), body);

  RefcellRun run;
  run.outcome = evaluate(program, Calculus::Ac, fuel);
  if (run.outcome.kind == OutcomeKind::Value) {
    Term cur = run.outcome.value;
    while (cur.kind() == Kind::Pair) {
      run.gets.push_back(cur.kid(0));
      cur = cur.kid(1);
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Structural checks

namespace {

bool is_placeholder(const Term& t, std::size_t& index) {
  const Term* name = nullptr;
  if (t.kind() == Kind::Var) name = &t;
  Term inner;
  if (t.kind() == Kind::Force && t.kid(0).kind() == Kind::Var) {
    inner = t.kid(0);
    name = &inner;
  }
  if (name == nullptr) return false;
  const std::string& s = name->name();
  if (s.size() < 3 || s[0] != '%') return false;
  if ((t.kind() == Kind::Var) != (s[1] == 'v')) return false;
  index = std::stoul(s.substr(2));
  return true;
}

Term placeholder(const Term& node, std::size_t i) {
  return child(node, i).is_value() ? mk::var("%v" + std::to_string(i))
                                   : mk::force(mk::var("%h" + std::to_string(i)));
}

std::string template_key(TranslationId stage, const Term& n) {
  std::string key = std::string(to_string(stage)) + ":" + std::string(to_string(n.kind()));
  if (n.kind() == Kind::OpCall) key += ":" + n.name();
  for (const auto& t : n.tags()) key += ":" + t;
  return key;
}

std::string path_text(const std::vector<std::size_t>& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "/" : "") + std::to_string(path[i]);
  return s;
}

class StructureChecker {
 public:
  StructureChecker(TranslationId stage, const Term& source, MacroReport& report)
      : stage_(stage), avoid_(all_names(source)), report_(report) {}

  void check(const Term& src, const Term& out) {
    const Kind k = src.kind();
    if (is_mam_kind(k)) {
      if (!same_shape(src, out)) {
        violation("homomorphism: " + std::string(to_string(k)) + " not mapped to " + std::string(to_string(k)));
        return;
      }
      for (std::size_t i = 0; i < num_children(src); ++i) descend(i, child(src, i), child(out, i));
      return;
    }
    if (is_label_kind(k) || k == Kind::Labeled) {
      violation("runtime label in source");
      return;
    }
    Term tmpl;
    try {
      tmpl = instantiate(stage_, src, [&](std::size_t i) { return placeholder(src, i); }, Fresh{avoid_});
    } catch (const TranslationError& e) {
      violation(e.what());
      return;
    }
    const std::string key = template_key(stage_, src);
    auto [it, inserted] = first_.emplace(key, tmpl);
    if (!inserted && !alpha_equal(it->second, tmpl)) {
      violation("template for " + key + " differs from its first instantiation");
    }
    std::vector<std::optional<Term>> holes(num_children(src));
    allowed_.clear();
    for (std::size_t i = 0; i < src.num_scopes(); ++i) allowed_.insert(src.binders(i).begin(), src.binders(i).end());
    env_.clear();
    if (!match(tmpl, out, holes)) {
      violation("output is not an instance of the " + key + " template");
      return;
    }
    for (std::size_t i = 0; i < holes.size(); ++i) {
      if (!holes[i]) {
        violation("template hole " + std::to_string(i) + " unused");
        continue;
      }
      descend(i, child(src, i), *holes[i]);
    }
  }

 private:
  TranslationId stage_;
  std::set<std::string> avoid_;
  MacroReport& report_;
  std::map<std::string, Term> first_;
  std::vector<std::size_t> path_;
  std::vector<std::pair<std::string, std::string>> env_;
  std::set<std::string> allowed_;

  void violation(const std::string& what) { report_.violations.push_back(path_text(path_) + ": " + what); }

  void descend(std::size_t i, const Term& src, const Term& out) {
    path_.push_back(i);
    check(src, out);
    path_.pop_back();
  }

  static bool same_shape(const Term& a, const Term& b) {
    if (a.kind() != b.kind() || a.name() != b.name() || a.index() != b.index() || a.tags() != b.tags()) return false;
    if (a.num_kids() != b.num_kids() || a.num_scopes() != b.num_scopes()) return false;
    for (std::size_t i = 0; i < a.num_scopes(); ++i) {
      if (a.binders(i) != b.binders(i)) return false;
    }
    return true;
  }

  bool match(const Term& t, const Term& a, std::vector<std::optional<Term>>& holes) {
    std::size_t idx = 0;
    if (is_placeholder(t, idx)) {
      if (t.is_value() != a.is_value()) return false;
      for (const auto& fv : a.free_vars()) {
        for (auto e = env_.rbegin(); e != env_.rend(); ++e) {
          if (e->second != fv) continue;
          // Only the source node's own binders may reach into a hole.
          if (e->first != e->second || allowed_.count(fv) == 0) return false;
          break;
        }
      }
      if (holes[idx]) return alpha_equal(*holes[idx], a);
      holes[idx] = a;
      return true;
    }
    if (t.kind() != a.kind()) return false;
    if (t.kind() == Kind::Var) {
      for (auto e = env_.rbegin(); e != env_.rend(); ++e) {
        const bool l = e->first == t.name();
        const bool r = e->second == a.name();
        if (l || r) return l && r;
      }
      return t.name() == a.name();
    }
    if (t.name() != a.name() || t.index() != a.index() || t.tags() != a.tags()) return false;
    if (t.num_kids() != a.num_kids() || t.num_scopes() != a.num_scopes()) return false;
    for (std::size_t i = 0; i < t.num_kids(); ++i) {
      if (!match(t.kid(i), a.kid(i), holes)) return false;
    }
    for (std::size_t i = 0; i < t.num_scopes(); ++i) {
      if (t.binders(i).size() != a.binders(i).size()) return false;
      const std::size_t mark = env_.size();
      for (std::size_t j = 0; j < t.binders(i).size(); ++j) env_.emplace_back(t.binders(i)[j], a.binders(i)[j]);
      const bool ok = match(t.scope_body(i), a.scope_body(i), holes);
      env_.resize(mark);
      if (!ok) return false;
    }
    return true;
  }
};

void check_stage(TranslationId stage, const Term& source, const Term& out, MacroReport& report,
                 const std::string& prefix) {
  MacroReport local;
  StructureChecker(stage, source, local).check(source, out);
  for (auto& v : local.violations) report.violations.push_back(prefix + v);
}

}  // namespace

MacroReport check_translation(TranslationId id, const Term& source, const Term& translated) {
  MacroReport report;
  report.target_program = !check_calculus(translated, target_of(id), true).has_value();
  if (!report.target_program) report.violations.push_back("output is not a target program");
  if (is_stage(id)) {
    check_stage(id, source, translated, report, "");
  } else {
    const Term mid = translate_term(source, TranslationId::EffToDel);
    check_stage(TranslationId::EffToDel, source, mid, report, "eff_to_del ");
    check_stage(TranslationId::DelToAcCounter, mid, translated, report, "del_to_ac_counter ");
  }
  return report;
}

MacroReport check_macro_conditions(TranslationId id, const Term& p) {
  return check_translation(id, p, translate(p, id));
}

}  // namespace ctlcalc
