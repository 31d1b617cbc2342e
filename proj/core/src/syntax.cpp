#include "ctlcalc/syntax.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace ctlcalc {

namespace {

constexpr std::array<std::string_view, 5> kCalculusNames = {"mam", "del", "ac", "eff", "ref"};

// Sort of each child, per kind: 'v' value, 'c' computation.
struct Shape {
  std::string_view kids;
  char scope_sort;  // sort of every scope body, or 0
};

Shape shape_of(Kind k) {
  switch (k) {
    case Kind::Var:
    case Kind::Unit:
    case Kind::DelLabel:
    case Kind::AcLabel:
    case Kind::EffLabel:
    case Kind::RefCell:
      return {"", 0};
    case Kind::Pair:
      return {"vv", 0};
    case Kind::Inj:
      return {"v", 0};
    case Kind::Thunk:
      return {"c", 0};
    case Kind::PCase:
    case Kind::SCase:
      return {"v", 'c'};
    case Kind::Force:
    case Kind::Return:
    case Kind::Create:
    case Kind::Yield:
    case Kind::OpCall:
    case Kind::RefCreate:
    case Kind::RefGet:
      return {"v", 0};
    case Kind::Seq:
    case Kind::Dollar:
    case Kind::Handle:
      return {"c", 'c'};
    case Kind::Abs:
    case Kind::Shift0:
      return {"", 'c'};
    case Kind::App:
      return {"cv", 0};
    case Kind::CPair:
      return {"cc", 0};
    case Kind::Prj:
    case Kind::Labeled:
      return {"c", 0};
    case Kind::Throw:
    case Kind::Resume:
    case Kind::RefSet:
      return {"vv", 0};
  }
  return {"", 0};
}

void check_sort(const Term& t, char sort, Kind parent) {
  if (t.empty()) {
    throw std::invalid_argument(std::string("null child in ") + std::string(to_string(parent)));
  }
  const bool want_value = sort == 'v';
  if (t.is_value() != want_value) {
    throw std::invalid_argument(std::string(to_string(parent)) + ": expected a " +
                                (want_value ? "value" : "computation") + " child, got " +
                                std::string(to_string(t.kind())));
  }
}

void merge_free(std::vector<std::string>& into, const std::vector<std::string>& from,
                const std::vector<std::string>* minus) {
  for (const auto& n : from) {
    if (minus != nullptr && std::find(minus->begin(), minus->end(), n) != minus->end()) continue;
    into.push_back(n);
  }
}

Term finish(Node node) {
  const Shape shape = shape_of(node.kind);
  if (node.kids.size() != shape.kids.size()) {
    throw std::invalid_argument(std::string("wrong arity for ") + std::string(to_string(node.kind)));
  }
  for (std::size_t i = 0; i < node.kids.size(); ++i) check_sort(node.kids[i], shape.kids[i], node.kind);
  for (const auto& s : node.scopes) check_sort(s.body, shape.scope_sort, node.kind);

  std::vector<std::string> fv;
  if (node.kind == Kind::Var) fv.push_back(node.name);
  bool labels = is_label_kind(node.kind);
  bool active = node.kind == Kind::Labeled;
  std::size_t size = 1;
  for (const auto& k : node.kids) {
    merge_free(fv, k.free_vars(), nullptr);
    labels = labels || k.has_labels();
    active = active || k.has_active();
    size += k.size();
  }
  for (const auto& s : node.scopes) {
    merge_free(fv, s.body.free_vars(), &s.binders);
    labels = labels || s.body.has_labels();
    active = active || s.body.has_active();
    size += s.body.size();
  }
  std::sort(fv.begin(), fv.end());
  fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
  node.free = std::move(fv);
  node.labels = labels;
  node.active = active;
  node.size = size;
  return Term(std::make_shared<const Node>(std::move(node)));
}

Node blank(Kind k) {
  Node n;
  n.kind = k;
  return n;
}

Term unary(Kind k, Term a) {
  Node n = blank(k);
  n.kids = {std::move(a)};
  return finish(std::move(n));
}

Term binary(Kind k, Term a, Term b) {
  Node n = blank(k);
  n.kids = {std::move(a), std::move(b)};
  return finish(std::move(n));
}

const std::vector<std::string> kNoStrings;

}  // namespace

std::string_view to_string(Calculus c) { return kCalculusNames[static_cast<std::size_t>(c)]; }

std::optional<Calculus> parse_calculus(std::string_view name) {
  for (std::size_t i = 0; i < kCalculusNames.size(); ++i) {
    if (kCalculusNames[i] == name) return static_cast<Calculus>(i);
  }
  return std::nullopt;
}

std::string_view to_string(LabelSort s) {
  switch (s) {
    case LabelSort::Del:
      return "del";
    case LabelSort::Ac:
      return "ac";
    case LabelSort::Eff:
      return "eff";
    case LabelSort::Ref:
      return "ref";
  }
  return "?";
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Var: return "var";
    case Kind::Unit: return "unit";
    case Kind::Pair: return "pair";
    case Kind::Inj: return "inj";
    case Kind::Thunk: return "thunk";
    case Kind::DelLabel: return "del-label";
    case Kind::AcLabel: return "ac-label";
    case Kind::EffLabel: return "eff-label";
    case Kind::RefCell: return "ref-cell";
    case Kind::PCase: return "pcase";
    case Kind::SCase: return "case";
    case Kind::Force: return "force";
    case Kind::Return: return "return";
    case Kind::Seq: return "let";
    case Kind::Abs: return "lam";
    case Kind::App: return "app";
    case Kind::CPair: return "cpair";
    case Kind::Prj: return "prj";
    case Kind::Shift0: return "shift0";
    case Kind::Dollar: return "dollar";
    case Kind::Throw: return "throw";
    case Kind::Create: return "create";
    case Kind::Resume: return "resume";
    case Kind::Yield: return "yield";
    case Kind::Labeled: return "labeled";
    case Kind::OpCall: return "op";
    case Kind::Handle: return "handle";
    case Kind::RefCreate: return "ref";
    case Kind::RefSet: return "set!";
    case Kind::RefGet: return "get";
  }
  return "?";
}

bool is_value_kind(Kind k) { return k <= Kind::RefCell; }

bool is_label_kind(Kind k) {
  return k == Kind::DelLabel || k == Kind::AcLabel || k == Kind::EffLabel || k == Kind::RefCell;
}

bool is_mam_kind(Kind k) {
  switch (k) {
    case Kind::Var:
    case Kind::Unit:
    case Kind::Pair:
    case Kind::Inj:
    case Kind::Thunk:
    case Kind::PCase:
    case Kind::SCase:
    case Kind::Force:
    case Kind::Return:
    case Kind::Seq:
    case Kind::Abs:
    case Kind::App:
    case Kind::CPair:
    case Kind::Prj:
      return true;
    default:
      return false;
  }
}

bool kind_in_calculus(Kind k, Calculus c) {
  if (is_mam_kind(k)) return true;
  switch (c) {
    case Calculus::Mam:
      return false;
    case Calculus::Del:
      return k == Kind::Shift0 || k == Kind::Dollar || k == Kind::Throw || k == Kind::DelLabel;
    case Calculus::Ac:
      return k == Kind::Create || k == Kind::Resume || k == Kind::Yield || k == Kind::Labeled ||
             k == Kind::AcLabel;
    case Calculus::Eff:
      return k == Kind::OpCall || k == Kind::Handle || k == Kind::Throw || k == Kind::EffLabel;
    case Calculus::Ref:
      return k == Kind::RefCreate || k == Kind::RefSet || k == Kind::RefGet || k == Kind::RefCell;
  }
  return false;
}

LabelSort label_sort(Kind k) {
  switch (k) {
    case Kind::DelLabel:
      return LabelSort::Del;
    case Kind::AcLabel:
      return LabelSort::Ac;
    case Kind::EffLabel:
      return LabelSort::Eff;
    case Kind::RefCell:
      return LabelSort::Ref;
    default:
      throw std::invalid_argument("not a label kind: " + std::string(to_string(k)));
  }
}

// ---------------------------------------------------------------------------
// Term accessors

Kind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
std::uint64_t Term::index() const { return node_->index; }
std::size_t Term::num_kids() const { return node_->kids.size(); }
Term Term::kid(std::size_t i) const { return node_->kids.at(i); }
std::size_t Term::num_scopes() const { return node_->scopes.size(); }
const std::vector<std::string>& Term::binders(std::size_t i) const { return node_->scopes.at(i).binders; }
Term Term::scope_body(std::size_t i) const { return node_->scopes.at(i).body; }
const std::vector<std::string>& Term::tags() const { return node_->tags; }
const std::vector<std::string>& Term::free_vars() const { return node_ ? node_->free : kNoStrings; }
bool Term::has_labels() const { return node_->labels; }
bool Term::has_active() const { return node_->active; }
std::size_t Term::size() const { return node_->size; }

Handler Term::handler() const {
  if (kind() == Kind::EffLabel) return *node_->label_handler;
  if (kind() != Kind::Handle) throw std::logic_error("handler() on a non-handler node");
  Handler h;
  h.ret_binder = node_->scopes[0].binders[0];
  h.ret_body = node_->scopes[0].body;
  for (std::size_t i = 1; i < node_->scopes.size(); ++i) {
    const auto& s = node_->scopes[i];
    h.ops.push_back(OpClause{node_->tags[i - 1], s.binders[0], s.binders[1], s.body});
  }
  return h;
}

Term Term::with_kid(std::size_t i, Term replacement) const {
  Node n = *node_;
  n.kids.at(i) = std::move(replacement);
  return finish(std::move(n));
}

const OpClause* Handler::find(std::string_view op) const {
  for (const auto& c : ops) {
    if (c.op == op) return &c;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Constructors

namespace mk {

Term var(std::string name) {
  Node n = blank(Kind::Var);
  n.name = std::move(name);
  return finish(std::move(n));
}

Term unit() {
  static const Term u = finish(blank(Kind::Unit));
  return u;
}

Term pair(Term a, Term b) { return binary(Kind::Pair, std::move(a), std::move(b)); }

Term inj(std::string tag, Term v) {
  Node n = blank(Kind::Inj);
  n.name = std::move(tag);
  n.kids = {std::move(v)};
  return finish(std::move(n));
}

Term thunk(Term c) { return unary(Kind::Thunk, std::move(c)); }

Term label(LabelSort sort, std::uint64_t id) {
  switch (sort) {
    case LabelSort::Del:
      return del_label(id);
    case LabelSort::Ac:
      return ac_label(id);
    case LabelSort::Ref:
      return ref_cell(id);
    case LabelSort::Eff:
      throw std::invalid_argument("effect labels need a handler");
  }
  return {};
}

Term del_label(std::uint64_t id) {
  Node n = blank(Kind::DelLabel);
  n.index = id;
  return finish(std::move(n));
}

Term ac_label(std::uint64_t id) {
  Node n = blank(Kind::AcLabel);
  n.index = id;
  return finish(std::move(n));
}

Term eff_label(std::uint64_t id, Handler h) {
  return eff_label(id, std::make_shared<const Handler>(std::move(h)));
}

Term eff_label(std::uint64_t id, std::shared_ptr<const Handler> h) {
  Node n = blank(Kind::EffLabel);
  n.index = id;
  n.label_handler = std::move(h);
  return finish(std::move(n));
}

Term ref_cell(std::uint64_t id) {
  Node n = blank(Kind::RefCell);
  n.index = id;
  return finish(std::move(n));
}

Term pcase(Term v, std::string x1, std::string x2, Term body) {
  Node n = blank(Kind::PCase);
  n.kids = {std::move(v)};
  n.scopes.push_back(Scope{{std::move(x1), std::move(x2)}, std::move(body)});
  return finish(std::move(n));
}

Term scase(Term v, std::vector<CaseClause> clauses) {
  Node n = blank(Kind::SCase);
  n.kids = {std::move(v)};
  for (auto& c : clauses) {
    n.tags.push_back(std::move(c.tag));
    n.scopes.push_back(Scope{{std::move(c.binder)}, std::move(c.body)});
  }
  return finish(std::move(n));
}

Term force(Term v) { return unary(Kind::Force, std::move(v)); }
Term ret(Term v) { return unary(Kind::Return, std::move(v)); }

Term seq(std::string x, Term m, Term n) {
  Node node = blank(Kind::Seq);
  node.kids = {std::move(m)};
  node.scopes.push_back(Scope{{std::move(x)}, std::move(n)});
  return finish(std::move(node));
}

Term lam(std::string x, Term body) {
  Node n = blank(Kind::Abs);
  n.scopes.push_back(Scope{{std::move(x)}, std::move(body)});
  return finish(std::move(n));
}

Term app(Term m, Term v) { return binary(Kind::App, std::move(m), std::move(v)); }
Term cpair(Term m, Term n) { return binary(Kind::CPair, std::move(m), std::move(n)); }

Term prj(std::uint64_t i, Term m) {
  if (i != 1 && i != 2) throw std::invalid_argument("projection index must be 1 or 2");
  Node n = blank(Kind::Prj);
  n.index = i;
  n.kids = {std::move(m)};
  return finish(std::move(n));
}

Term shift0(std::string k, Term body) {
  Node n = blank(Kind::Shift0);
  n.scopes.push_back(Scope{{std::move(k)}, std::move(body)});
  return finish(std::move(n));
}

Term dollar(Term m, std::string x, Term n) {
  Node node = blank(Kind::Dollar);
  node.kids = {std::move(m)};
  node.scopes.push_back(Scope{{std::move(x)}, std::move(n)});
  return finish(std::move(node));
}

Term throw_(Term v, Term w) { return binary(Kind::Throw, std::move(v), std::move(w)); }
Term create(Term v) { return unary(Kind::Create, std::move(v)); }
Term resume(Term v, Term w) { return binary(Kind::Resume, std::move(v), std::move(w)); }
Term yield(Term v) { return unary(Kind::Yield, std::move(v)); }

Term labeled(std::uint64_t id, Term m) {
  Node n = blank(Kind::Labeled);
  n.index = id;
  n.kids = {std::move(m)};
  return finish(std::move(n));
}

Term op_call(std::string op, Term v) {
  Node n = blank(Kind::OpCall);
  n.name = std::move(op);
  n.kids = {std::move(v)};
  return finish(std::move(n));
}

Term handle(Handler h, Term m) {
  Node n = blank(Kind::Handle);
  n.kids = {std::move(m)};
  n.scopes.push_back(Scope{{std::move(h.ret_binder)}, std::move(h.ret_body)});
  for (auto& c : h.ops) {
    n.tags.push_back(std::move(c.op));
    n.scopes.push_back(Scope{{std::move(c.param), std::move(c.cont)}, std::move(c.body)});
  }
  return finish(std::move(n));
}

Term ref_create(Term v) { return unary(Kind::RefCreate, std::move(v)); }
Term ref_set(Term v, Term w) { return binary(Kind::RefSet, std::move(v), std::move(w)); }
Term ref_get(Term v) { return unary(Kind::RefGet, std::move(v)); }

Term nat(std::uint64_t n) {
  Term t = inj("Zero", unit());
  for (std::uint64_t i = 0; i < n; ++i) t = inj("Succ", t);
  return t;
}

}  // namespace mk

std::optional<std::uint64_t> as_nat(const Term& v) {
  std::uint64_t n = 0;
  Term cur = v;
  while (cur.kind() == Kind::Inj && cur.name() == "Succ") {
    ++n;
    cur = cur.kid(0);
  }
  if (cur.kind() == Kind::Inj && cur.name() == "Zero" && cur.kid(0).kind() == Kind::Unit) return n;
  return std::nullopt;
}

Term rebuild(const Term& t, std::vector<Term> kids, std::vector<Term> bodies,
             std::vector<std::vector<std::string>> binders) {
  Node n = *t.get();
  n.kids = std::move(kids);
  if (bodies.size() != n.scopes.size() || binders.size() != n.scopes.size()) {
    throw std::invalid_argument("rebuild: scope count mismatch");
  }
  for (std::size_t i = 0; i < n.scopes.size(); ++i) {
    n.scopes[i].body = std::move(bodies[i]);
    n.scopes[i].binders = std::move(binders[i]);
  }
  return finish(std::move(n));
}

// ---------------------------------------------------------------------------
// Names

std::set<std::string> free_vars(const Term& t) {
  return {t.free_vars().begin(), t.free_vars().end()};
}

namespace {

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind() == Kind::Var) out.insert(t.name());
  for (std::size_t i = 0; i < t.num_kids(); ++i) collect_names(t.kid(i), out);
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    for (const auto& b : t.binders(i)) out.insert(b);
    collect_names(t.scope_body(i), out);
  }
}

bool intersects(const std::vector<std::string>& sorted, const Bindings& b) {
  for (const auto& [k, _] : b) {
    if (std::binary_search(sorted.begin(), sorted.end(), k)) return true;
  }
  return false;
}

Term subst(const Term& t, const Bindings& b) {
  if (b.empty() || !intersects(t.free_vars(), b)) return t;
  if (t.kind() == Kind::Var) return b.at(t.name());

  std::vector<Term> kids;
  kids.reserve(t.num_kids());
  for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(subst(t.kid(i), b));

  std::vector<Term> bodies;
  std::vector<std::vector<std::string>> binders;
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    const Term body = t.scope_body(i);
    std::vector<std::string> names = t.binders(i);
    Bindings local;
    for (const auto& [k, v] : b) {
      if (std::find(names.begin(), names.end(), k) != names.end()) continue;
      if (std::binary_search(body.free_vars().begin(), body.free_vars().end(), k)) local.emplace(k, v);
    }
    if (local.empty()) {
      bodies.push_back(body);
      binders.push_back(std::move(names));
      continue;
    }
    std::set<std::string> incoming;
    for (const auto& [_, v] : local) incoming.insert(v.free_vars().begin(), v.free_vars().end());
    std::set<std::string> avoid = incoming;
    avoid.insert(body.free_vars().begin(), body.free_vars().end());
    avoid.insert(names.begin(), names.end());
    for (const auto& [k, _] : local) avoid.insert(k);
    for (auto& n : names) {
      if (incoming.count(n) == 0) continue;
      std::string renamed = fresh_name(n, avoid);
      avoid.insert(renamed);
      local[n] = mk::var(renamed);
      n = std::move(renamed);
    }
    bodies.push_back(subst(body, local));
    binders.push_back(std::move(names));
  }
  return rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
}

}  // namespace

std::set<std::string> all_names(const Term& t) {
  std::set<std::string> out;
  collect_names(t, out);
  return out;
}

std::string fresh_name(std::string_view base, const std::set<std::string>& avoid) {
  std::string root(base);
  if (auto us = root.rfind('_'); us != std::string::npos && us + 1 < root.size() && us > 0) {
    const bool digits = std::all_of(root.begin() + static_cast<std::ptrdiff_t>(us) + 1, root.end(),
                                    [](char c) { return c >= '0' && c <= '9'; });
    if (digits) root.resize(us);
  }
  if (avoid.count(root) == 0) return root;
  for (std::uint64_t i = 1;; ++i) {
    std::string candidate = root + "_" + std::to_string(i);
    if (avoid.count(candidate) == 0) return candidate;
  }
}

Term substitute(const Term& t, const Bindings& bindings) { return subst(t, bindings); }

Term substitute(const Term& t, const std::string& x, const Term& v) {
  return subst(t, Bindings{{x, v}});
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

bool alpha(const Term& a, const Term& b, Env& env) {
  if (a == b && a.closed()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        const bool left = it->first == a.name();
        const bool right = it->second == b.name();
        if (left || right) return left && right;
      }
      return a.name() == b.name();
    }
    case Kind::DelLabel:
    case Kind::AcLabel:
    case Kind::EffLabel:
    case Kind::RefCell:
      return a.index() == b.index();
    default:
      break;
  }
  if (a.name() != b.name() || a.index() != b.index() || a.tags() != b.tags()) return false;
  if (a.num_kids() != b.num_kids() || a.num_scopes() != b.num_scopes()) return false;
  for (std::size_t i = 0; i < a.num_kids(); ++i) {
    if (!alpha(a.kid(i), b.kid(i), env)) return false;
  }
  for (std::size_t i = 0; i < a.num_scopes(); ++i) {
    const auto& ba = a.binders(i);
    const auto& bb = b.binders(i);
    if (ba.size() != bb.size()) return false;
    const std::size_t mark = env.size();
    for (std::size_t j = 0; j < ba.size(); ++j) env.emplace_back(ba[j], bb[j]);
    const bool ok = alpha(a.scope_body(i), b.scope_body(i), env);
    env.resize(mark);
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  Env env;
  return alpha(a, b, env);
}

// ---------------------------------------------------------------------------
// Calculus membership

namespace {

struct Checker {
  Calculus calculus;
  bool program;
  std::vector<std::size_t> path;
  std::vector<std::string> bound;

  std::optional<CalculusViolation> fail(const Term& t, std::string reason) const {
    return CalculusViolation{path, t, std::string(to_string(t.kind())), std::move(reason)};
  }

  std::optional<CalculusViolation> visit(const Term& t) {
    if (!kind_in_calculus(t.kind(), calculus)) {
      return fail(t, "constructor not in " + std::string(to_string(calculus)));
    }
    if (program && is_label_kind(t.kind())) return fail(t, "runtime label in a program");
    if (program && t.kind() == Kind::Labeled) return fail(t, "labeled computation in a program");
    if (program && t.kind() == Kind::Var &&
        std::find(bound.begin(), bound.end(), t.name()) == bound.end()) {
      return fail(t, "unbound variable " + t.name());
    }
    if (t.kind() == Kind::SCase || t.kind() == Kind::Handle) {
      std::vector<std::string> tags = t.tags();
      std::sort(tags.begin(), tags.end());
      if (std::adjacent_find(tags.begin(), tags.end()) != tags.end()) {
        return fail(t, "duplicate clause " + *std::adjacent_find(tags.begin(), tags.end()));
      }
    }
    std::size_t child = 0;
    for (std::size_t i = 0; i < t.num_kids(); ++i, ++child) {
      path.push_back(child);
      auto v = visit(t.kid(i));
      path.pop_back();
      if (v) return v;
    }
    for (std::size_t i = 0; i < t.num_scopes(); ++i, ++child) {
      const std::size_t mark = bound.size();
      for (const auto& b : t.binders(i)) bound.push_back(b);
      path.push_back(child);
      auto v = visit(t.scope_body(i));
      path.pop_back();
      bound.resize(mark);
      if (v) return v;
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<CalculusViolation> check_calculus(const Term& t, Calculus c, bool require_program) {
  if (require_program && !t.is_computation()) {
    return CalculusViolation{{}, t, std::string(to_string(t.kind())), "a program must be a computation"};
  }
  Checker checker{c, require_program, {}, {}};
  return checker.visit(t);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Term& t, std::string& out) {
  auto open = [&](std::string_view head) {
    out += '(';
    out += head;
  };
  auto sp = [&](const Term& k) {
    out += ' ';
    print(k, out);
  };
  switch (t.kind()) {
    case Kind::Var:
      out += t.name();
      return;
    case Kind::Unit:
      out += "()";
      return;
    case Kind::Pair:
      open("pair");
      sp(t.kid(0));
      sp(t.kid(1));
      out += ')';
      return;
    case Kind::Inj:
      if (auto n = as_nat(t)) {
        out += "(nat " + std::to_string(*n) + ")";
        return;
      }
      open("inj ");
      out += t.name();
      sp(t.kid(0));
      out += ')';
      return;
    case Kind::Thunk:
      open("thunk");
      sp(t.kid(0));
      out += ')';
      return;
    case Kind::DelLabel:
      out += "#d" + std::to_string(t.index());
      return;
    case Kind::AcLabel:
      out += "#c" + std::to_string(t.index());
      return;
    case Kind::EffLabel:
      out += "#e" + std::to_string(t.index());
      return;
    case Kind::RefCell:
      out += "#r" + std::to_string(t.index());
      return;
    case Kind::PCase:
      open("pcase");
      sp(t.kid(0));
      out += " (" + t.binders(0)[0] + " " + t.binders(0)[1] + ")";
      sp(t.scope_body(0));
      out += ')';
      return;
    case Kind::SCase:
      open("case");
      sp(t.kid(0));
      for (std::size_t i = 0; i < t.num_scopes(); ++i) {
        out += " (" + t.tags()[i] + " " + t.binders(i)[0];
        sp(t.scope_body(i));
        out += ')';
      }
      out += ')';
      return;
    case Kind::Seq:
      open("let ");
      out += t.binders(0)[0];
      sp(t.kid(0));
      sp(t.scope_body(0));
      out += ')';
      return;
    case Kind::Abs:
      open("lam ");
      out += t.binders(0)[0];
      sp(t.scope_body(0));
      out += ')';
      return;
    case Kind::Prj:
      open("prj ");
      out += std::to_string(t.index());
      sp(t.kid(0));
      out += ')';
      return;
    case Kind::Shift0:
      open("shift0 ");
      out += t.binders(0)[0];
      sp(t.scope_body(0));
      out += ')';
      return;
    case Kind::Dollar:
      open("dollar");
      sp(t.kid(0));
      out += ' ' + t.binders(0)[0];
      sp(t.scope_body(0));
      out += ')';
      return;
    case Kind::Labeled:
      open("labeled #c");
      out += std::to_string(t.index());
      sp(t.kid(0));
      out += ')';
      return;
    case Kind::OpCall:
      open("op ");
      out += t.name();
      sp(t.kid(0));
      out += ')';
      return;
    case Kind::Handle:
      out += "(handle (handler (ret " + t.binders(0)[0];
      sp(t.scope_body(0));
      out += ')';
      for (std::size_t i = 1; i < t.num_scopes(); ++i) {
        out += " (on " + t.tags()[i - 1] + " " + t.binders(i)[0] + " " + t.binders(i)[1];
        sp(t.scope_body(i));
        out += ')';
      }
      out += ')';
      sp(t.kid(0));
      out += ')';
      return;
    default:
      // Remaining kinds print as (head child...).
      open(to_string(t.kind()));
      for (std::size_t i = 0; i < t.num_kids(); ++i) sp(t.kid(i));
      out += ')';
      return;
  }
}

void collect_labels(const Term& t, std::set<std::pair<LabelSort, std::uint64_t>>& out) {
  if (!t.has_labels() && !t.has_active()) return;
  if (is_label_kind(t.kind())) out.emplace(label_sort(t.kind()), t.index());
  if (t.kind() == Kind::Labeled) out.emplace(LabelSort::Ac, t.index());
  for (std::size_t i = 0; i < t.num_kids(); ++i) collect_labels(t.kid(i), out);
  for (std::size_t i = 0; i < t.num_scopes(); ++i) collect_labels(t.scope_body(i), out);
}

}  // namespace

std::string pretty(const Term& t) {
  std::string out;
  print(t, out);
  return out;
}

std::set<std::pair<LabelSort, std::uint64_t>> labels_in(const Term& t) {
  std::set<std::pair<LabelSort, std::uint64_t>> out;
  collect_labels(t, out);
  return out;
}

}  // namespace ctlcalc
