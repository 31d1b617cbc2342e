#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctlcalc/machine.hpp"
#include "ctlcalc/syntax.hpp"
#include "ctlcalc/translate.hpp"

namespace ctlcalc {

struct GenConfig {
  Calculus calculus = Calculus::Del;
  std::uint64_t seed = 0;
  std::size_t max_size = 30;
  std::size_t binder_depth_cap = 8;
  std::vector<std::string> op_pool = {"E", "F"};
  // Relative weights keyed by constructor; missing kinds use built-in defaults.
  std::map<Kind, double> weights;
  // Share of choices spent on the calculus' own constructors when available.
  double control_share = 0.4;
  // Fraction of programs drawn from the pure MAM fragment.
  double pure_share = 0.1;
};

/// The index-th program of the stream described by cfg: closed, label-free,
/// a program of cfg.calculus, and at most max(cfg.max_size, 2) nodes.
Term generate(const GenConfig& cfg, std::uint64_t index);

struct Observation {
  enum class Kind : std::uint8_t { Unit, Pair, Inj, Opaque } kind = Kind::Opaque;
  std::string tag;
  std::vector<Observation> kids;

  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe(const Term& value);
std::string to_string(const Observation& o);
// Equal up to opaque leaves on the source side, which match anything.
bool observation_matches(const Observation& source, const Observation& target);

struct FuelPolicy {
  std::uint64_t base = 1000;
  std::uint64_t linear = 64;
  std::uint64_t quadratic = 16;

  [[nodiscard]] std::uint64_t operator()(std::uint64_t source_steps) const {
    return base + linear * source_steps + quadratic * source_steps * source_steps;
  }
};

struct DiffOptions {
  // Check AC well-formedness at every configuration of AC-side runs.
  bool check_wf = true;
  // Check that counter cells never decrease along counter-translated runs.
  bool check_counters = true;
};

struct Verdict {
  enum class Kind : std::uint8_t { Agree, Disagree, Inconclusive } kind = Kind::Agree;
  OutcomeKind source = OutcomeKind::Stuck;
  std::optional<OutcomeKind> target;  // absent when the source ran out of fuel
  std::optional<Observation> source_obs;
  std::optional<Observation> target_obs;
  std::uint64_t source_steps = 0;
  std::uint64_t target_steps = 0;
  bool target_fuel_side = false;  // Inconclusive: which side ran out
  // Invariant failures observed on the target run.
  std::vector<std::string> invariant_violations;
  std::string program_text;
  std::string origin;  // "seed:<n>/<i>" or "corpus:<name>"
};

std::string_view to_string(Verdict::Kind k);

Verdict diff_run(const Term& p, TranslationId id, std::uint64_t source_fuel, const FuelPolicy& policy = {},
                 const DiffOptions& options = {});

struct CorpusEntry {
  std::string name;
  Calculus calculus;
  Term program;
  OutcomeKind expected;
  std::optional<Observation> expected_obs;
};

// Built-in programs, in a fixed order.
const std::vector<CorpusEntry>& corpus();
const CorpusEntry* corpus_entry(std::string_view name);

struct SuiteItem {
  std::uint64_t index = 0;
  std::string seed;  // decimal seed or corpus:<name>
  Verdict verdict;
};

struct SuiteReport {
  TranslationId translation = TranslationId::DelToAcCounter;
  std::uint64_t seed = 0;
  std::vector<SuiteItem> items;
  std::size_t agree = 0;
  std::size_t disagree = 0;
  std::size_t inconclusive = 0;
  std::size_t invariant_failures = 0;
};

struct SuiteOptions {
  std::uint64_t count = 100;
  std::uint64_t source_fuel = 10000;
  FuelPolicy policy;
  DiffOptions diff;
  // Append corpus programs of the translation's source calculus.
  bool include_corpus = false;
};

// cfg.calculus is overridden by the translation's source calculus.
SuiteReport run_suite(GenConfig cfg, TranslationId id, const SuiteOptions& options);

// One JSON record per item followed by a summary record.
std::string report_to_jsonl(const SuiteReport& r);
std::string verdict_to_json(const Verdict& v);

}  // namespace ctlcalc
