#pragma once

#include <cstdint>
#include <string>

#include "ctlcalc/syntax.hpp"
#include "ctlcalc/translate.hpp"

namespace testsup {

struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::string first_failure;

  [[nodiscard]] bool ok() const { return instances > 0 && failures == 0; }
  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

std::string describe(const PropertyResult& r);

// Syntax
PropertyResult alpha_is_equivalence(std::size_t n, std::uint64_t seed);
PropertyResult alpha_matches_nameless(std::size_t n, std::uint64_t seed);
PropertyResult substitution_matches_oracle(std::size_t n, std::uint64_t seed);
PropertyResult mam_check_is_included(std::size_t n, std::uint64_t seed);
PropertyResult print_parse_round_trip(ctlcalc::Calculus c, std::size_t n, std::uint64_t seed);

// Machine, over generated programs of c
PropertyResult machine_invariants(ctlcalc::Calculus c, std::size_t n, std::uint64_t seed);

// Translations
PropertyResult substitution_commutes(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
PropertyResult plug_commutes(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
PropertyResult frames_to_frames(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
PropertyResult mam_identity(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
PropertyResult templates_hold(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
// Counts mutants the structural check failed to reject.
PropertyResult mutation_detected(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);
PropertyResult free_vars_preserved(ctlcalc::TranslationId id, std::size_t n, std::uint64_t seed);

// The faulty variant used as negative control: Seq(x, M, N) becomes
// Seq(x, Seq(w, return (), [M]), [N]).
ctlcalc::Term mutated_translation(const ctlcalc::Term& p, ctlcalc::TranslationId id);

}  // namespace testsup
