// Command-line front end: generation, proving, checking, strategy work, and
// the exhaustive analyses, as subcommands over the text formats.
//
// Exit codes: 0 = success / accepted / winning; 1 = well-formed negative
// verdict (rejected proof, losing strategy, empty search); 2 = usage or
// input errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mres/countermodels.hpp"
#include "mres/diagnostics.hpp"
#include "mres/families.hpp"
#include "mres/proof.hpp"
#include "mres/qbf.hpp"
#include "mres/truth_table.hpp"

namespace {

using namespace mres;

std::string join_ints(const std::vector<int>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

template <typename Set>
std::string join_set(const Set& xs) {
  return join_ints(std::vector<int>(xs.begin(), xs.end()));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

// Writes via `emit` to `path`, or to stdout when path is empty. Returns true
// when stdout was used (callers then skip their key=value summary).
template <typename Emit>
bool write_output(const std::string& path, Emit emit) {
  if (path.empty()) {
    emit(std::cout);
    return true;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  emit(out);
  return false;
}

void print_failures(const std::vector<CheckFailure>& failures) {
  for (const auto& f : failures) {
    std::cout << "failure_line=" << f.line
              << " failure_kind=" << check_error_name(f.kind) << '\n';
    std::cerr << "line " << f.line << ": " << check_error_name(f.kind) << ": "
              << f.message << '\n';
  }
}

// Parses and checks a proof, printing the verdict lines. Returns the checked
// proof, or nullopt on rejection (the caller should exit 1). Structural
// defects caught by the parser count as rejections too; only files that are
// not proof-shaped at all propagate as input errors.
std::optional<Proof> checked_proof(const QBF& qbf, const std::string& path,
                                   CheckMode mode) {
  Proof proof;
  try {
    auto in = open_input(path);
    proof = parse_proof(in);
  } catch (const ProofParseError& e) {
    if (!e.kind) throw;
    std::cout << "failure_line=0 failure_kind=" << check_error_name(*e.kind)
              << '\n';
    std::cerr << path << ":" << e.line << ": " << e.what() << '\n';
    std::cout << "verdict=rejected\n";
    return std::nullopt;
  }
  CheckReport rep = check_proof(qbf, proof, mode);
  std::cout << "lines=" << rep.stats.line_count
            << " axioms=" << rep.stats.axiom_count << '\n';
  print_failures(rep.failures);
  std::cout << (rep.ok() ? "verdict=accepted\n" : "verdict=rejected\n");
  if (!rep.ok()) return std::nullopt;
  return proof;
}

Family family_arg(const std::string& name) {
  auto f = family_from_name(name);
  if (!f) throw Error("unknown family '" + name + "'");
  return *f;
}

std::string table_bits_line(const UniversalTable& ut) {
  std::ostringstream os;
  os << "owner=" << ut.owner << " vars=";
  const auto& vs = ut.table.vars();
  for (size_t i = 0; i < vs.size(); ++i) os << (i ? "," : "") << vs[i];
  os << " bits=" << ut.table.bit_string();
  return os.str();
}

struct Options {
  std::string family, formula, proof, strategy, out, table, groups;
  int n = 0;
  int max_lines = 10000, max_clause_width = 32, max_map_size = 64;
  int uci_line = 0, parity = -1;
  std::vector<int> boundary, regular_vars;
  bool strict = false, soundness = false, report_min_dt = false;
  int exhaustive_cap = 24;
  uint64_t enum_cap = 1ull << 24;
  int threads = 1;
};

int run_gen(const Options& o) {
  FamilyInstance inst = gen_family(family_arg(o.family), o.n);
  bool to_stdout = write_output(o.out, [&](std::ostream& s) { s << inst.qdimacs(); });
  if (!to_stdout)
    std::cout << "vars=" << inst.qbf.prefix.max_var()
              << " clauses=" << inst.qbf.matrix.size() << '\n';
  return 0;
}

int run_prove(const Options& o) {
  if (family_arg(o.family) != Family::Equality)
    throw Error("prove supports only the equality family");
  Proof proof = generate_equality_refutation(o.n);
  bool to_stdout = write_output(o.out, [&](std::ostream& s) { emit_proof(proof, s); });
  if (!to_stdout) std::cout << "lines=" << proof.lines.size() << '\n';
  return 0;
}

int run_check(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  auto proof = checked_proof(
      qbf, o.proof, o.strict ? CheckMode::StrictChoices : CheckMode::InferChoices);
  if (!proof) return 1;
  if (o.soundness) {
    CheckReport rep = check_soundness_invariant(qbf, *proof, o.exhaustive_cap);
    print_failures(rep.failures);
    std::cout << (rep.ok() ? "soundness=ok\n" : "soundness=violated\n");
    if (!rep.ok()) return 1;
  }
  return 0;
}

int run_extract(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  auto proof = checked_proof(qbf, o.proof, CheckMode::InferChoices);
  if (!proof) return 1;
  Strategy s = extract_strategy(*proof);
  write_output(o.out, [&](std::ostream& os) { emit_strategy(s, os); });
  return 0;
}

int run_verify_strategy(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  auto in = open_input(o.strategy);
  Strategy s = parse_strategy(in);
  VerifyResult r = verify_countermodel(qbf, s, o.exhaustive_cap);
  if (r.winning) {
    std::cout << "winning=true\n";
    return 0;
  }
  if (r.witness) {
    std::string w = r.witness->str();
    for (char& c : w)
      if (c == ' ') c = ',';
    std::cout << "witness=" << w << '\n';
  }
  std::cout << "winning=false\n";
  return 1;
}

int run_classify(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  auto proof = checked_proof(qbf, o.proof, CheckMode::InferChoices);
  if (!proof) return 1;
  std::set<Var> pivots(o.regular_vars.begin(), o.regular_vars.end());
  if (pivots.empty())
    for (const auto& line : proof->lines)
      if (!line.is_axiom()) pivots.insert(line.resolution().pivot);
  std::cout << "tree_like=" << (is_tree_like(*proof) ? "true" : "false") << '\n';
  std::cout << "regular=" << (is_regular(*proof, pivots) ? "true" : "false") << '\n';
  return 0;
}

int run_diag(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  auto proof = checked_proof(qbf, o.proof, CheckMode::InferChoices);
  if (!proof) return 1;
  if (o.uci_line != 0) {
    auto inst = instance_from_comments(qbf);
    if (!inst)
      throw Error("--uci needs a formula generated with family metadata comments");
    std::vector<std::optional<int>> grouping;
    if (o.groups == "phi") grouping = phi_grouping(*inst);
    else if (o.groups == "A") grouping = a_grouping(*inst);
    else throw Error("--groups must be 'phi' or 'A'");
    std::set<int> labels = uci(*proof, o.uci_line, grouping);
    bool interval = labels.empty() ||
                    (*labels.rbegin() - *labels.begin() + 1 == (int)labels.size());
    std::cout << "uci=" << join_set(labels) << '\n';
    std::cout << "uci_interval=" << (interval ? "true" : "false") << '\n';
  } else {
    std::set<Var> vars(o.boundary.begin(), o.boundary.end());
    BoundaryReport rep = boundary_sets(*proof, vars);
    std::cout << "s=" << join_set(rep.s) << '\n';
    std::cout << "s_prime=" << join_set(rep.s_prime) << '\n';
  }
  return 0;
}

int run_dtsize(const Options& o) {
  TruthTable t;
  if (o.parity >= 0) {
    t = parity_table(o.parity);
  } else if (!o.table.empty()) {
    auto in = open_input(o.table);
    t = parse_truth_table(in);
  } else {
    throw Error("dtsize needs --parity N or --table PATH");
  }
  DtResult r = min_dt_size(t);
  std::cout << "size=" << r.size << '\n';
  std::cout << "min_path_queries=" << r.witness.min_path_queries() << '\n';
  return 0;
}

int run_enum(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  EnumResult res = enumerate_countermodels(qbf, o.enum_cap, o.threads);
  std::cout << "candidates=" << res.candidates << '\n';
  std::cout << "countermodels=" << res.winners.size() << '\n';
  for (size_t i = 0; i < res.winners.size(); ++i) {
    for (const UniversalTable& ut : res.winners[i]) {
      std::cout << "countermodel=" << i + 1 << " index=" << res.winner_indices[i]
                << ' ' << table_bits_line(ut);
      if (o.report_min_dt)
        std::cout << " mindt=" << min_dt_size(ut.table).size;
      std::cout << '\n';
    }
  }
  return res.winners.empty() ? 1 : 0;
}

int run_check_antisym(const Options& o) {
  auto in = open_input(o.strategy);
  // Sniff the record type: merge-map strategies open with 's', truth-table
  // strategies with 't' (owners then follow the alternating-block layout).
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  char first = 0;
  std::istringstream sniff(text);
  std::string tok;
  while (sniff >> tok) {
    if (tok == "c") {
      std::getline(sniff, tok);
      continue;
    }
    first = tok[0];
    break;
  }
  std::optional<AntisymViolation> v;
  if (first == 's') {
    v = antisym_violation(parse_strategy(text), o.n);
  } else if (first == 't') {
    std::istringstream is(text);
    std::vector<TruthTable> tables = parse_truth_tables(is);
    TableStrategy s;
    for (size_t i = 0; i < tables.size(); ++i)
      s.push_back(UniversalTable{(int)(3 * (i + 1)), tables[i]});
    v = antisym_violation(s, o.n);
  } else {
    throw Error("unrecognized strategy file (expected 's' or 't' records)");
  }
  if (v) {
    std::cout << "violation_universal=" << v->i
              << " violation_prefix=" << v->prefix << " violation_got=" << v->got
              << '\n';
    std::cout << "antisymmetric=false\n";
    return 1;
  }
  std::cout << "antisymmetric=true\n";
  return 0;
}

int run_search(const Options& o) {
  QBF qbf = parse_qdimacs_file(o.formula);
  SearchCaps caps;
  caps.max_lines = o.max_lines;
  caps.max_clause_width = o.max_clause_width;
  caps.max_map_size = o.max_map_size;
  auto proof = saturation_search(qbf, caps);
  if (!proof) {
    std::cout << "found=false\n";
    return 1;
  }
  std::cout << "found=true\n";
  std::cout << "lines=" << proof->lines.size() << '\n';
  if (!o.out.empty())
    write_output(o.out, [&](std::ostream& s) { emit_proof(*proof, s); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Merge-resolution proof tools for prenex CNF QBFs"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--exhaustive-cap", o.exhaustive_cap,
                 "Max existential variables for exhaustive checks")
      ->capture_default_str();
  app.add_option("--enum-cap", o.enum_cap, "Max strategy candidates to enumerate")
      ->capture_default_str();
  auto* threads_opt =
      app.add_option("--threads", o.threads,
                     "Worker threads for enumeration (0 = hardware)")
          ->capture_default_str();

  auto* gen = app.add_subcommand("gen", "Generate a benchmark family instance");
  gen->add_option("--family", o.family,
                  "equality | qparity | lqparity | cr | kbkf_lq")
      ->required();
  gen->add_option("--n", o.n, "Instance size")->required();
  gen->add_option("--out", o.out, "Output path (default: stdout)");

  auto* prove = app.add_subcommand("prove", "Emit a built-in refutation");
  prove->add_option("--family", o.family, "Only 'equality' has one")->required();
  prove->add_option("--n", o.n, "Instance size")->required();
  prove->add_option("--out", o.out, "Output path (default: stdout)");

  auto* check = app.add_subcommand("check", "Check a refutation");
  check->add_option("--formula", o.formula, "QDIMACS file")->required();
  check->add_option("--proof", o.proof, "Proof file")->required();
  check->add_flag("--strict-choices", o.strict,
                  "Follow recorded per-universal choices instead of inferring");
  check->add_flag("--soundness-invariant", o.soundness,
                  "Also check every line's maps against its sub-derivation");

  auto* extract = app.add_subcommand("extract", "Extract the sink strategy");
  extract->add_option("--formula", o.formula, "QDIMACS file")->required();
  extract->add_option("--proof", o.proof, "Proof file")->required();
  extract->add_option("--out", o.out, "Output path (default: stdout)");

  auto* verify = app.add_subcommand("verify-strategy",
                                    "Play a strategy against all assignments");
  verify->add_option("--formula", o.formula, "QDIMACS file")->required();
  verify->add_option("--strategy", o.strategy, "Strategy file")->required();

  auto* classify = app.add_subcommand("classify", "Report proof shape");
  classify->add_option("--formula", o.formula, "QDIMACS file")->required();
  classify->add_option("--proof", o.proof, "Proof file")->required();
  classify->add_option("--regular-vars", o.regular_vars,
                       "Pivots for the regularity check (default: all)")
      ->delimiter(',');

  auto* diag = app.add_subcommand("diag", "Axiom-usage and boundary probes");
  diag->add_option("--formula", o.formula, "QDIMACS file")->required();
  diag->add_option("--proof", o.proof, "Proof file")->required();
  auto* uci_opt = diag->add_option("--uci", o.uci_line,
                                   "Line id: which clause groups feed it");
  diag->add_option("--groups", o.groups, "Grouping for --uci: phi | A");
  auto* boundary_opt =
      diag->add_option("--boundary", o.boundary, "Variable ids to avoid")
          ->delimiter(',');
  uci_opt->excludes(boundary_opt);

  auto* dtsize = app.add_subcommand("dtsize", "Minimal decision-tree size");
  dtsize->add_option("--parity", o.parity, "Use the n-variable parity function");
  dtsize->add_option("--table", o.table, "Read a truth-table file");

  auto* enumc = app.add_subcommand("enum-countermodels",
                                   "Enumerate all winning strategies");
  enumc->add_option("--formula", o.formula, "QDIMACS file")->required();
  enumc->add_flag("--report-min-dt", o.report_min_dt,
                  "Also print each table's minimal decision-tree size");

  auto* antisym = app.add_subcommand(
      "check-antisym", "Alternating-assignment forcing property");
  antisym->add_option("--strategy", o.strategy, "Strategy or truth-table file")
      ->required();
  antisym->add_option("--n", o.n, "Block count")->required();

  auto* search = app.add_subcommand("search", "Saturation search for a refutation");
  search->add_option("--formula", o.formula, "QDIMACS file")->required();
  search->add_option("--max-lines", o.max_lines, "Line cap")->capture_default_str();
  search->add_option("--max-clause-width", o.max_clause_width, "Clause width cap")
      ->capture_default_str();
  search->add_option("--max-map-size", o.max_map_size, "Map instruction cap")
      ->capture_default_str();
  search->add_option("--out", o.out, "Write the found proof here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (!*threads_opt) {
    if (const char* env = std::getenv("MRES_THREADS")) o.threads = std::atoi(env);
  }

  try {
    if (*gen) return run_gen(o);
    if (*prove) return run_prove(o);
    if (*check) return run_check(o);
    if (*extract) return run_extract(o);
    if (*verify) return run_verify_strategy(o);
    if (*classify) return run_classify(o);
    if (*diag) return run_diag(o);
    if (*dtsize) return run_dtsize(o);
    if (*enumc) return run_enum(o);
    if (*antisym) return run_check_antisym(o);
    if (*search) return run_search(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line;
    if (e.col > 0) std::cerr << ", col " << e.col;
    std::cerr << ")\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
