#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctlcalc/syntax.hpp"

namespace ctlcalc {

enum class EntryKind : std::uint8_t { Nil, DelCont, EffCont, AcVal, RefVal };

std::string_view to_string(EntryKind k);

struct StoreEntry {
  EntryKind kind = EntryKind::Nil;
  Term term;  // empty for Nil

  static StoreEntry nil() { return {}; }
};

struct LabelKey {
  LabelSort sort;
  std::uint64_t id;

  friend auto operator<=>(const LabelKey&, const LabelKey&) = default;
};

std::string to_string(const LabelKey& k);

/// Finite partial map from labels to entries. A Nil entry is a present
/// entry; `find` returns nullptr only for labels outside the domain.
class Store {
 public:
  [[nodiscard]] bool contains(LabelKey k) const { return entries_.count(k) != 0; }
  [[nodiscard]] const StoreEntry* find(LabelKey k) const;
  void set(LabelKey k, StoreEntry e);

  [[nodiscard]] std::uint64_t next_id(LabelSort s) const { return next_[static_cast<std::size_t>(s)]; }
  // Reserves the next id of sort s.
  std::uint64_t allocate(LabelSort s) { return next_[static_cast<std::size_t>(s)]++; }

  [[nodiscard]] const std::map<LabelKey, StoreEntry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

 private:
  std::map<LabelKey, StoreEntry> entries_;
  std::uint64_t next_[4] = {0, 0, 0, 0};
};

// A fresh label value of the given sort. Effect labels need their handler.
Term fresh_label(Store& store, LabelSort sort, std::shared_ptr<const Handler> handler = nullptr);

struct Config {
  bool bottom = false;
  Term comp;
  Store store;

  static Config running(Term c, Store s = {}) { return Config{false, std::move(c), std::move(s)}; }
  static Config error() { return Config{true, {}, {}}; }
};

enum class StuckReason : std::uint8_t {
  None,
  ForeignConstructor,
  ShiftWithoutDollar,
  YieldWithoutLabeled,
  OpWithoutHandler,
  UnhandledOp,
  NotAPair,
  NotAnInjection,
  NoMatchingClause,
  NotAThunk,
  NotAFunction,
  NotAComputationPair,
  ReturnInApplication,
  ReturnInProjection,
  TerminalNonReturn,
  NotALabel,
  UnknownLabel,
  WrongEntry,
  FreeVariable,
};

std::string_view to_string(StuckReason r);

/// An evaluation context split at its redex.
///
/// `frames` run outermost first; each frame is the enclosing node with the
/// hole at kid 0. For shift0/yield/op redexes, `redex` is the delimiter node,
/// `inner` the pure frames between delimiter and operator, and `control` the
/// operator itself.
struct Decomposition {
  std::vector<Term> frames;
  Term redex;
  std::vector<Term> inner;
  Term control;
};

struct DecomposeResult {
  enum class Kind : std::uint8_t { Redex, Terminal, NoRedex } kind;
  Decomposition decomposition;
  Term value;  // Terminal only
  StuckReason reason = StuckReason::None;
};

DecomposeResult decompose(const Term& c, Calculus calculus);

// Whether a frame node belongs to the pure frame grammar.
bool is_pure_frame(const Term& frame);
Term plug(const std::vector<Term>& frames, Term hole);

struct StoreDelta {
  LabelKey label;
  std::optional<StoreEntry> before;
  StoreEntry after;
};

struct StepResult {
  enum class Kind : std::uint8_t { Stepped, Terminal, Stuck } kind;
  Config next;  // Stepped: may be the error configuration
  std::string rule;
  std::vector<StoreDelta> delta;
  Term value;  // Terminal
  StuckReason reason = StuckReason::None;
};

StepResult step(const Config& cfg, Calculus calculus);

enum class OutcomeKind : std::uint8_t { Value, Bottom, Stuck, FuelExhausted };

std::string_view to_string(OutcomeKind k);

struct TraceEntry {
  std::uint64_t step;  // 1-based
  std::string rule;
  Term comp;  // computation after the step; empty when the step reached the error state
  std::vector<StoreDelta> delta;
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Stuck;
  Term value;    // Value
  Config final;  // final configuration (error configuration for Bottom)
  StuckReason reason = StuckReason::None;
  std::uint64_t steps = 0;
  std::vector<TraceEntry> trace;
  bool trace_truncated = false;
};

struct EvalOptions {
  std::uint64_t fuel = 100000;
  bool trace = false;
  std::size_t max_trace = 10000;
  // Called on the initial configuration and after every step, with the
  // store writes of that step.
  std::function<void(const Config&, const std::vector<StoreDelta>&)> observer;
};

/// Runs `p` from the empty store. Throws std::invalid_argument if p is not a
/// program of the calculus.
Outcome evaluate(const Term& p, Calculus calculus, const EvalOptions& options);
Outcome evaluate(const Term& p, Calculus calculus, std::uint64_t fuel, bool want_trace = false);

// Runs an arbitrary configuration with no program check.
Outcome run(Config cfg, Calculus calculus, const EvalOptions& options);

struct WfViolation {
  std::uint64_t label;
  std::string clause;
};

std::set<std::uint64_t> active_labels(const Term& t);

/// AC configuration well-formedness: WF of the computation, no active labels
/// inside stored values, and every active label mapped to nil.
std::optional<WfViolation> ac_well_formed(const Config& cfg);
// Same check when only the entries in `delta` changed since a configuration
// that was well-formed.
std::optional<WfViolation> ac_well_formed_after(const Config& cfg, const std::vector<StoreDelta>& delta);

/// Adds `op p k -> let r = op p in throw k r` to every handler for each
/// operation occurring in t that the handler lacks.
Term forward_ops(const Term& t);

// One line-delimited JSON record per trace entry.
std::string trace_to_jsonl(const Outcome& o);

}  // namespace ctlcalc
