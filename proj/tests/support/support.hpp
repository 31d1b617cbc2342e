#pragma once

// Reference implementations used as oracles by the tests. They are written
// against the public Term API only and deliberately avoid the library's own
// substitution and alpha-equivalence code.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ctlcalc/difftest.hpp"
#include "ctlcalc/machine.hpp"
#include "ctlcalc/syntax.hpp"

namespace testsup {

using ctlcalc::Kind;
using ctlcalc::Term;

// Nameless rendering: bound variables become binder distances, so two terms
// are alpha-equivalent exactly when their keys are equal. Within one scope a
// later binder shadows an earlier one with the same name.
inline void db_key(const Term& t, std::vector<std::string>& env, std::string& out) {
  if (t.kind() == Kind::Var) {
    for (std::size_t i = env.size(); i-- > 0;) {
      if (env[i] == t.name()) {
        out += "#" + std::to_string(env.size() - 1 - i);
        return;
      }
    }
    out += "$" + t.name();
    return;
  }
  out += "(";
  out += std::string(ctlcalc::to_string(t.kind()));
  if (t.kind() == Kind::Inj || t.kind() == Kind::OpCall) out += ":" + t.name();
  if (t.kind() == Kind::Prj || ctlcalc::is_label_kind(t.kind())) out += ":" + std::to_string(t.index());
  for (const auto& tag : t.tags()) out += " @" + tag;
  for (std::size_t i = 0; i < t.num_kids(); ++i) {
    out += " ";
    db_key(t.kid(i), env, out);
  }
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    const auto& bs = t.binders(i);
    out += " [" + std::to_string(bs.size()) + "]";
    for (const auto& b : bs) env.push_back(b);
    db_key(t.scope_body(i), env, out);
    env.resize(env.size() - bs.size());
  }
  out += ")";
}

inline std::string db_key(const Term& t) {
  std::vector<std::string> env;
  std::string out;
  db_key(t, env, out);
  return out;
}

// Renames every binder to a name of the form <prefix><n>, unique in the
// result. Free variables are untouched.
class Renamer {
 public:
  explicit Renamer(std::string prefix) : prefix_(std::move(prefix)) {}

  Term operator()(const Term& t) { return go(t, {}); }

 private:
  std::string prefix_;
  std::size_t next_ = 0;

  Term go(const Term& t, const std::map<std::string, std::string>& env) {
    if (t.kind() == Kind::Var) {
      auto it = env.find(t.name());
      return it == env.end() ? t : ctlcalc::mk::var(it->second);
    }
    std::vector<Term> kids;
    for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(go(t.kid(i), env));
    std::vector<Term> bodies;
    std::vector<std::vector<std::string>> binders;
    for (std::size_t i = 0; i < t.num_scopes(); ++i) {
      auto inner = env;
      std::vector<std::string> bs;
      for (const auto& b : t.binders(i)) {
        std::string fresh = prefix_ + std::to_string(next_++);
        inner[b] = fresh;  // a repeated binder maps to its last renaming
        bs.push_back(fresh);
      }
      bodies.push_back(go(t.scope_body(i), inner));
      binders.push_back(std::move(bs));
    }
    if (t.num_kids() == 0 && t.num_scopes() == 0) return t;
    return ctlcalc::rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
  }
};

// Substitution with no capture check. Correct when no binder of t occurs free
// in any substituted value, e.g. after renaming t with a Renamer.
inline Term naive_subst(const Term& t, const std::map<std::string, Term>& s) {
  if (t.kind() == Kind::Var) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  if (t.num_kids() == 0 && t.num_scopes() == 0) return t;
  std::vector<Term> kids;
  for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(naive_subst(t.kid(i), s));
  std::vector<Term> bodies;
  std::vector<std::vector<std::string>> binders;
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    auto inner = s;
    for (const auto& b : t.binders(i)) inner.erase(b);
    bodies.push_back(naive_subst(t.scope_body(i), inner));
    binders.push_back(t.binders(i));
  }
  return ctlcalc::rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
}

// Replaces value nodes selected by `pick` (which sees each value node once,
// preorder) by the returned term.
inline Term map_values(const Term& t, const std::function<std::optional<Term>(const Term&)>& pick) {
  if (t.is_value()) {
    if (auto r = pick(t)) return *r;
  }
  if (t.num_kids() == 0 && t.num_scopes() == 0) return t;
  std::vector<Term> kids;
  for (std::size_t i = 0; i < t.num_kids(); ++i) kids.push_back(map_values(t.kid(i), pick));
  std::vector<Term> bodies;
  std::vector<std::vector<std::string>> binders;
  for (std::size_t i = 0; i < t.num_scopes(); ++i) {
    bodies.push_back(map_values(t.scope_body(i), pick));
    binders.push_back(t.binders(i));
  }
  return ctlcalc::rebuild(t, std::move(kids), std::move(bodies), std::move(binders));
}

// An open variant of t: each unit leaf becomes Var x with probability p.
inline Term open_up(const Term& t, const std::string& x, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  return map_values(t, [&](const Term& v) -> std::optional<Term> {
    if (v.kind() == Kind::Unit && coin(rng)) return ctlcalc::mk::var(x);
    return std::nullopt;
  });
}

// Big-step evaluator for the pure fragment, used to cross-check the
// small-step machine. Counts one step per beta rule.
struct RefResult {
  enum class Kind { Value, Stuck, Fuel } kind;
  Term value;
  std::uint64_t steps = 0;
};

class MamReference {
 public:
  explicit MamReference(std::uint64_t fuel) : fuel_(fuel) {}

  RefResult run(const Term& p) {
    try {
      Term r = eval(p);
      if (r.kind() == Kind::Return) return {RefResult::Kind::Value, r.kid(0), steps_};
      return {RefResult::Kind::Stuck, {}, steps_};
    } catch (const StuckSignal&) {
      return {RefResult::Kind::Stuck, {}, steps_};
    } catch (const FuelSignal&) {
      return {RefResult::Kind::Fuel, {}, steps_};
    }
  }

 private:
  struct StuckSignal {};
  struct FuelSignal {};
  std::uint64_t fuel_;
  std::uint64_t steps_ = 0;

  void tick() {
    if (steps_ == fuel_) throw FuelSignal{};
    ++steps_;
  }

  // Returns a terminal computation: return, lambda or computation pair.
  Term eval(Term m) {
    for (;;) {
      switch (m.kind()) {
        case Kind::Return:
        case Kind::Abs:
        case Kind::CPair:
          return m;
        case Kind::Seq: {
          Term r = eval(m.kid(0));
          if (r.kind() != Kind::Return) throw StuckSignal{};
          tick();
          m = ctlcalc::substitute(m.scope_body(0), m.binders(0)[0], r.kid(0));
          break;
        }
        case Kind::App: {
          Term f = eval(m.kid(0));
          if (f.kind() != Kind::Abs) throw StuckSignal{};
          tick();
          m = ctlcalc::substitute(f.scope_body(0), f.binders(0)[0], m.kid(1));
          break;
        }
        case Kind::Prj: {
          Term c = eval(m.kid(0));
          if (c.kind() != Kind::CPair) throw StuckSignal{};
          tick();
          m = c.kid(m.index() - 1);
          break;
        }
        case Kind::Force:
          if (m.kid(0).kind() != Kind::Thunk) throw StuckSignal{};
          tick();
          m = m.kid(0).kid(0);
          break;
        case Kind::PCase: {
          Term v = m.kid(0);
          if (v.kind() != Kind::Pair) throw StuckSignal{};
          tick();
          const auto& bs = m.binders(0);
          ctlcalc::Bindings b;
          b[bs[0]] = v.kid(0);
          b[bs[1]] = v.kid(1);
          m = ctlcalc::substitute(m.scope_body(0), b);
          break;
        }
        case Kind::SCase: {
          Term v = m.kid(0);
          if (v.kind() != Kind::Inj) throw StuckSignal{};
          const auto& tags = m.tags();
          std::size_t i = 0;
          while (i < tags.size() && tags[i] != v.name()) ++i;
          if (i == tags.size()) throw StuckSignal{};
          tick();
          m = ctlcalc::substitute(m.scope_body(i), m.binders(i)[0], v.kid(0));
          break;
        }
        default:
          throw StuckSignal{};
      }
    }
  }
};

inline std::vector<Term> programs(ctlcalc::Calculus c, std::size_t n, std::uint64_t seed, std::size_t max_size = 30) {
  ctlcalc::GenConfig g;
  g.calculus = c;
  g.seed = seed;
  g.max_size = max_size;
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ctlcalc::generate(g, i));
  return out;
}

inline const std::vector<ctlcalc::Calculus>& calculi() {
  static const std::vector<ctlcalc::Calculus> all = {ctlcalc::Calculus::Mam, ctlcalc::Calculus::Del,
                                                     ctlcalc::Calculus::Ac, ctlcalc::Calculus::Eff,
                                                     ctlcalc::Calculus::Ref};
  return all;
}

}  // namespace testsup
