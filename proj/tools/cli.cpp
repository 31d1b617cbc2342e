#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ctlcalc/difftest.hpp"
#include "ctlcalc/machine.hpp"
#include "ctlcalc/parser.hpp"
#include "ctlcalc/translate.hpp"
#include "json.hpp"

namespace ctlcalc::cli {

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_fuel() {
  if (const char* env = std::getenv("CTLCALC_FUEL")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Usage(std::string("CTLCALC_FUEL is not a number: ") + env);
    }
  }
  return 100000;
}

Calculus calculus_arg(const std::string& name) {
  auto c = parse_calculus(name);
  if (!c) throw Usage("unknown calculus '" + name + "' (expected mam, del, ac, eff or ref)");
  return *c;
}

// Resolves a file argument: corpus:<name>, a path, or standard input.
SourceFile load(const std::string& file, const std::string& calculus, std::istream& in) {
  std::optional<Calculus> c;
  if (!calculus.empty()) c = calculus_arg(calculus);
  if (file.rfind("corpus:", 0) == 0) {
    const CorpusEntry* e = corpus_entry(file.substr(7));
    if (e == nullptr) throw Usage("no corpus program named '" + file.substr(7) + "'");
    if (c && *c != e->calculus) {
      // Reparse so that the requested calculus' membership rules apply.
      return SourceFile{parse_program(print_program(e->program), *c), *c};
    }
    return SourceFile{e->program, e->calculus};
  }
  std::string text;
  if (file.empty() || file == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    std::ifstream f(file);
    if (!f) throw Usage("cannot read " + file);
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return parse_source(text, c);
}

int outcome_code(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return kOk;
    case OutcomeKind::Bottom: return kBottom;
    case OutcomeKind::Stuck: return kStuck;
    case OutcomeKind::FuelExhausted: return kFuel;
  }
  return kUsage;
}

void print_outcome(const Outcome& o, bool json, std::ostream& out) {
  if (json) {
    nlohmann::ordered_json j;
    j["outcome"] = to_string(o.kind);
    j["steps"] = o.steps;
    if (o.kind == OutcomeKind::Value) j["value_observation"] = to_string(observe(o.value));
    if (o.kind == OutcomeKind::Stuck) j["reason"] = to_string(o.reason);
    out << j.dump() << '\n';
    return;
  }
  switch (o.kind) {
    case OutcomeKind::Value:
      out << pretty(o.value) << '\n';
      break;
    case OutcomeKind::Bottom:
      out << "bottom after " << o.steps << " steps\n";
      break;
    case OutcomeKind::Stuck:
      out << "stuck after " << o.steps << " steps: " << to_string(o.reason) << '\n';
      break;
    case OutcomeKind::FuelExhausted:
      out << "fuel exhausted after " << o.steps << " steps\n";
      break;
  }
}

TranslationId translation_for(Calculus from, Calculus to, const std::string& variant) {
  if (from == Calculus::Del && to == Calculus::Ac) {
    if (variant.empty() || variant == "counter") return TranslationId::DelToAcCounter;
    if (variant == "naive") return TranslationId::DelToAcNaive;
    throw Usage("unknown variant '" + variant + "' (expected naive or counter)");
  }
  if (!variant.empty()) throw Usage("--variant only applies to del -> ac");
  for (TranslationId id : all_translations()) {
    if (source_of(id) == from && target_of(id) == to && id != TranslationId::DelToAcNaive) return id;
  }
  throw Usage("no translation from " + std::string(to_string(from)) + " to " + std::string(to_string(to)));
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreters and translations for one-shot control calculi", "ctlcalc"};
  app.require_subcommand(1);

  std::string file, calculus, from, to, variant, out_path, translation, name;
  std::uint64_t fuel = 0, seed = 0, count = 100, size = 30, max_trace = 10000;
  bool json = false, want_trace = false, list = false, with_corpus = false;

  auto* eval = app.add_subcommand("eval", "Evaluate a program");
  eval->add_option("file", file, "Program file, corpus:<name>, or - for stdin");
  eval->add_option("--calculus", calculus, "mam|del|ac|eff|ref (default: file header)");
  eval->add_option("--fuel", fuel, "Maximum number of steps");
  eval->add_flag("--trace", want_trace, "Print the trace as line-delimited JSON before the result");
  eval->add_flag("--json", json, "Print a JSON result document");

  auto* tr = app.add_subcommand("translate", "Translate a program");
  tr->add_option("file", file, "Program file, corpus:<name>, or - for stdin");
  tr->add_option("--from", from, "Source calculus")->required();
  tr->add_option("--to", to, "Target calculus")->required();
  tr->add_option("--variant", variant, "naive|counter for del -> ac");
  tr->add_option("--out", out_path, "Write to a file instead of stdout");

  auto* trace = app.add_subcommand("trace", "Print an evaluation trace");
  trace->add_option("file", file, "Program file, corpus:<name>, or - for stdin");
  trace->add_option("--calculus", calculus, "mam|del|ac|eff|ref (default: file header)");
  trace->add_option("--fuel", fuel, "Maximum number of steps");
  trace->add_option("--max-trace", max_trace, "Maximum number of trace records kept");

  auto* diff = app.add_subcommand("difftest", "Run a differential test suite");
  diff->add_option("--from", from, "Source calculus (checked against the translation)");
  diff->add_option("--translation", translation, "Translation id")->required();
  diff->add_option("--seed", seed, "Generator seed");
  diff->add_option("--count", count, "Number of generated programs");
  diff->add_option("--size", size, "Maximum program size in AST nodes");
  diff->add_option("--fuel", fuel, "Source fuel (default 10000)");
  diff->add_flag("--corpus", with_corpus, "Also run the built-in programs of the source calculus");
  diff->add_flag("--json", json, "Print line-delimited JSON records");

  auto* corp = app.add_subcommand("corpus", "Show built-in programs");
  corp->add_option("name", name, "Program name");
  corp->add_flag("--list", list, "List program names");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ctlcalc: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (eval->parsed() || trace->parsed()) {
      const SourceFile src = load(file, calculus, in);
      EvalOptions opts;
      opts.fuel = fuel != 0 ? fuel : default_fuel();
      opts.trace = want_trace || trace->parsed();
      opts.max_trace = max_trace;
      const Outcome o = evaluate(src.program, src.calculus, opts);
      if (opts.trace) out << trace_to_jsonl(o);
      if (trace->parsed() && !json) {
        err << to_string(o.kind) << " after " << o.steps << " steps\n";
      } else {
        print_outcome(o, json, out);
      }
      return outcome_code(o.kind);
    }
    if (tr->parsed()) {
      const Calculus f = calculus_arg(from);
      const TranslationId id = translation_for(f, calculus_arg(to), variant);
      const SourceFile src = load(file, from, in);
      const Term t = translate(src.program, id);
      const std::string text = ";; calculus: " + std::string(to_string(target_of(id))) + "\n" + print_program(t) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        std::ofstream f_out(out_path);
        if (!f_out) throw Usage("cannot write " + out_path);
        f_out << text;
      }
      return kOk;
    }
    if (diff->parsed()) {
      auto id = parse_translation(translation);
      if (!id) throw Usage("unknown translation '" + translation + "'");
      if (!from.empty() && calculus_arg(from) != source_of(*id)) {
        throw Usage(translation + " translates from " + std::string(to_string(source_of(*id))));
      }
      GenConfig g;
      g.seed = seed;
      g.max_size = size;
      SuiteOptions so;
      so.count = count;
      so.source_fuel = fuel != 0 ? fuel : 10000;
      so.include_corpus = with_corpus;
      const SuiteReport r = run_suite(g, *id, so);
      if (json) {
        out << report_to_jsonl(r);
      } else {
        out << to_string(*id) << " seed " << seed << ": " << r.items.size() << " programs, " << r.agree
            << " agree, " << r.disagree << " disagree, " << r.inconclusive << " inconclusive, "
            << r.invariant_failures << " invariant failures\n";
        for (const auto& item : r.items) {
          if (item.verdict.kind != Verdict::Kind::Disagree) continue;
          out << "disagree #" << item.index << " (" << item.verdict.origin << "): source "
              << to_string(item.verdict.source) << ", target " << to_string(*item.verdict.target) << "\n  "
              << item.verdict.program_text << '\n';
        }
      }
      return r.disagree > 0 ? kDisagree : kOk;
    }
    if (corp->parsed()) {
      if (list || name.empty()) {
        for (const auto& e : corpus()) {
          out << e.name << '\t' << to_string(e.calculus) << '\t' << to_string(e.expected) << '\n';
        }
        return kOk;
      }
      const CorpusEntry* e = corpus_entry(name);
      if (e == nullptr) throw Usage("no corpus program named '" + name + "'");
      out << ";; calculus: " << to_string(e->calculus) << '\n' << print_program(e->program) << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "ctlcalc: parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const TranslationError& e) {
    err << "ctlcalc: " << e.what() << '\n';
    return kUsage;
  } catch (const Usage& e) {
    err << "ctlcalc: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "ctlcalc: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ctlcalc::cli
