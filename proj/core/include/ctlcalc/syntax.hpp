#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ctlcalc {

enum class Calculus : std::uint8_t { Mam, Del, Ac, Eff, Ref };

std::string_view to_string(Calculus c);
std::optional<Calculus> parse_calculus(std::string_view name);

// Runtime label sorts. Each sort has its own id space.
enum class LabelSort : std::uint8_t { Del, Ac, Eff, Ref };

std::string_view to_string(LabelSort s);

enum class Kind : std::uint8_t {
  // values
  Var,
  Unit,
  Pair,
  Inj,
  Thunk,
  DelLabel,
  AcLabel,
  EffLabel,
  RefCell,
  // computations
  PCase,
  SCase,
  Force,
  Return,
  Seq,
  Abs,
  App,
  CPair,
  Prj,
  Shift0,
  Dollar,
  Throw,
  Create,
  Resume,
  Yield,
  Labeled,
  OpCall,
  Handle,
  RefCreate,
  RefSet,
  RefGet,
};

std::string_view to_string(Kind k);
bool is_value_kind(Kind k);
bool is_label_kind(Kind k);
// Constructors shared by every calculus.
bool is_mam_kind(Kind k);
bool kind_in_calculus(Kind k, Calculus c);

class Term;
struct Handler;

struct Node;

/// Immutable, structurally shared AST handle.
///
/// A Term is either a value or a computation; the sort is fixed by its kind.
/// Free variables and a few label flags are computed once at construction.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] bool is_value() const { return is_value_kind(kind()); }
  [[nodiscard]] bool is_computation() const { return !is_value(); }
  [[nodiscard]] bool empty() const { return node_ == nullptr; }

  // Var name, Inj tag, OpCall operation name.
  [[nodiscard]] const std::string& name() const;
  // Label id or projection index.
  [[nodiscard]] std::uint64_t index() const;

  [[nodiscard]] std::size_t num_kids() const;
  [[nodiscard]] Term kid(std::size_t i) const;
  [[nodiscard]] std::size_t num_scopes() const;
  [[nodiscard]] const std::vector<std::string>& binders(std::size_t i) const;
  [[nodiscard]] Term scope_body(std::size_t i) const;
  [[nodiscard]] const std::vector<std::string>& tags() const;

  // Handle: the installed handler. EffLabel: the handler the label carries.
  [[nodiscard]] Handler handler() const;

  [[nodiscard]] const std::vector<std::string>& free_vars() const;
  [[nodiscard]] bool closed() const { return free_vars().empty(); }
  // Any label value below this node (Thunk bodies included).
  [[nodiscard]] bool has_labels() const;
  // Any Labeled computation below this node.
  [[nodiscard]] bool has_active() const;
  [[nodiscard]] std::size_t size() const;

  [[nodiscard]] const Node* get() const { return node_.get(); }
  [[nodiscard]] const std::shared_ptr<const Node>& ptr() const { return node_; }

  // Same node with kids[0] replaced; used to plug evaluation frames.
  [[nodiscard]] Term with_kid(std::size_t i, Term replacement) const;

  friend bool operator==(const Term& a, const Term& b) { return a.node_ == b.node_; }

 private:
  std::shared_ptr<const Node> node_;
};

// A binding child: the names listed in `binders` scope over `body`.
struct Scope {
  std::vector<std::string> binders;
  Term body;
};

struct CaseClause {
  std::string tag;
  std::string binder;
  Term body;
};

struct OpClause {
  std::string op;
  std::string param;
  std::string cont;
  Term body;
};

struct Handler {
  std::string ret_binder;
  Term ret_body;
  std::vector<OpClause> ops;

  [[nodiscard]] const OpClause* find(std::string_view op) const;
};

struct Node {
  Kind kind;
  std::string name;
  std::uint64_t index = 0;
  std::vector<Term> kids;
  std::vector<Scope> scopes;
  std::vector<std::string> tags;
  std::shared_ptr<const Handler> label_handler;

  std::vector<std::string> free;
  bool labels = false;
  bool active = false;
  std::size_t size = 1;
};

// Node construction. Each checks value/computation sorts of its children and
// throws std::invalid_argument on a sort mismatch.
namespace mk {
Term var(std::string name);
Term unit();
Term pair(Term a, Term b);
Term inj(std::string tag, Term v);
Term thunk(Term c);
Term del_label(std::uint64_t id);
Term ac_label(std::uint64_t id);
Term eff_label(std::uint64_t id, Handler h);
Term eff_label(std::uint64_t id, std::shared_ptr<const Handler> h);
Term ref_cell(std::uint64_t id);
Term label(LabelSort sort, std::uint64_t id);

Term pcase(Term v, std::string x1, std::string x2, Term body);
Term scase(Term v, std::vector<CaseClause> clauses);
Term force(Term v);
Term ret(Term v);
Term seq(std::string x, Term m, Term n);
Term lam(std::string x, Term body);
Term app(Term m, Term v);
Term cpair(Term m, Term n);
Term prj(std::uint64_t i, Term m);
Term shift0(std::string k, Term body);
Term dollar(Term m, std::string x, Term n);
Term throw_(Term v, Term w);
Term create(Term v);
Term resume(Term v, Term w);
Term yield(Term v);
Term labeled(std::uint64_t id, Term m);
Term op_call(std::string op, Term v);
Term handle(Handler h, Term m);
Term ref_create(Term v);
Term ref_set(Term v, Term w);
Term ref_get(Term v);

// Peano numeral: inj Succ (... (inj Zero ())).
Term nat(std::uint64_t n);
}  // namespace mk

std::optional<std::uint64_t> as_nat(const Term& v);
LabelSort label_sort(Kind k);

// Rebuild a node with new children, scope bodies and binders; tags and
// scalar fields are kept. Children must keep their sorts.
Term rebuild(const Term& t, std::vector<Term> kids, std::vector<Term> bodies,
             std::vector<std::vector<std::string>> binders);

std::set<std::string> free_vars(const Term& t);
// Every name occurring in t, bound or free.
std::set<std::string> all_names(const Term& t);

using Bindings = std::map<std::string, Term>;

/// Simultaneous capture-avoiding substitution. Binders are renamed only when
/// a substituted value mentions them; untouched subtrees are shared.
Term substitute(const Term& t, const Bindings& bindings);
Term substitute(const Term& t, const std::string& x, const Term& v);

// Smallest `base_N` (or `base` itself) not in `avoid`.
std::string fresh_name(std::string_view base, const std::set<std::string>& avoid);

/// Equality up to consistent renaming of bound names. Label ids are rigid;
/// EffLabel handlers are not compared.
bool alpha_equal(const Term& a, const Term& b);

struct CalculusViolation {
  std::vector<std::size_t> path;  // child indices from the root (kids then scopes)
  Term subterm;
  std::string constructor;
  std::string reason;
};

std::optional<CalculusViolation> check_calculus(const Term& t, Calculus c, bool require_program);

/// Canonical s-expression rendering. Labels print as #d<n>, #c<n>, #e<n>, #r<n>;
/// Peano numerals print with the `nat` sugar.
std::string pretty(const Term& t);

// Labels occurring anywhere in t.
std::set<std::pair<LabelSort, std::uint64_t>> labels_in(const Term& t);

}  // namespace ctlcalc
