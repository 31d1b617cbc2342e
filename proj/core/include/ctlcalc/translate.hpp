#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctlcalc/machine.hpp"
#include "ctlcalc/syntax.hpp"

namespace ctlcalc {

enum class TranslationId : std::uint8_t {
  DelToAcNaive,
  DelToAcCounter,
  EffToDel,
  DelToEff,
  RefToAc,
  EffToAc,
};

std::string_view to_string(TranslationId id);
std::optional<TranslationId> parse_translation(std::string_view name);
Calculus source_of(TranslationId id);
Calculus target_of(TranslationId id);

// Every translation id, in declaration order.
const std::vector<TranslationId>& all_translations();

class TranslationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Translates a label-free program of the source calculus.
Term translate(const Term& p, TranslationId id);

/// Translates any label-free phrase, open terms included. Template binders
/// avoid every name of `t` and of `avoid`.
Term translate_term(const Term& t, TranslationId id, const std::set<std::string>& avoid = {});

enum class HelperName : std::uint8_t { Fail, Zero, Succ, Incr, Compare, Cmp, Ref, Th, Get, Set };

std::string_view to_string(HelperName h);
std::optional<HelperName> parse_helper(std::string_view name);

// Closed AC phrase for a helper; the same term on every call.
Term emit_helper(HelperName h);
Term emit_helper(std::string_view name);
// The cell body for initial content v; its binders avoid the free names of v.
Term refcell(const Term& v);

struct RefcellOp {
  bool is_set = false;
  Term value;  // Set only
};

struct RefcellRun {
  Outcome outcome;
  std::vector<Term> gets;
};

// Creates a counter cell holding v0 and drives it with the given operations
// through the get/set helpers inside one AC evaluation.
RefcellRun refcell_behaviour_check(const Term& v0, const std::vector<RefcellOp>& ops,
                                   std::uint64_t fuel = 1000000);

struct MacroReport {
  bool target_program = true;
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const { return target_program && violations.empty(); }
};

/// Structural checks on a translation: the output is a target program, MAM
/// constructors map homomorphically, and each other constructor is replaced
/// by one fixed template with the translated children in its holes.
MacroReport check_macro_conditions(TranslationId id, const Term& p);
// Same checks against a given output, e.g. one produced by a faulty variant.
MacroReport check_translation(TranslationId id, const Term& source, const Term& translated);

}  // namespace ctlcalc
