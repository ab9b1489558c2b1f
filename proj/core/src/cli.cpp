#include "chrg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "chrg/bench.hpp"
#include "chrg/engine.hpp"
#include "chrg/grammar.hpp"
#include "chrg/store.hpp"
#include "chrg/term_io.hpp"

namespace chrg {
namespace {

struct GrammarOpts {
  std::string file;
  bool lr = false;
  bool no_lr = false;
  std::string convention = "rightmost";
  std::string dedup = "default";
};

void add_grammar_opts(CLI::App* cmd, GrammarOpts& g) {
  cmd->add_option("grammar", g.file, "grammar file")->required();
  cmd->add_flag("--lr", g.lr, "restrict matching to textual left-to-right order");
  cmd->add_flag("--no-lr", g.no_lr, "lift a grammar-declared left-to-right mode");
  cmd->add_option("--lr-convention", g.convention,
                  "which head stays active under --lr (default rightmost)")
      ->check(CLI::IsMember({"rightmost", "leftmost"}));
  cmd->add_option("--dedup", g.dedup, "duplicate elimination (default per grammar)")
      ->check(CLI::IsMember({"on", "off", "default"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EngineError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CompiledGrammar load(const GrammarOpts& g, std::ostream& err) {
  Grammar gr = parse_grammar_source(read_file(g.file));
  std::vector<SymId> loops = loop_check(gr);
  if (!loops.empty()) {
    err << "warning: self-deriving nonterminals:";
    for (std::size_t i = 0; i < loops.size(); ++i)
      err << (i ? ", " : " ") << symbol_table::name(loops[i]);
    err << '\n';
  }
  CompileOptions opt;
  if (g.lr) opt.lr = true;
  if (g.no_lr) opt.lr = false;
  opt.lr_leftmost = g.convention == "leftmost";
  if (g.dedup == "on") opt.dedup = true;
  if (g.dedup == "off") opt.dedup = false;
  return compile_grammar(gr, opt);
}

std::vector<Term> gather_tokens(const std::vector<std::string>& words,
                                const std::string& file) {
  std::vector<Term> toks;
  if (!file.empty()) {
    std::istringstream in(read_file(file));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<Term> ts = lex_tokens(line);
      toks.insert(toks.end(), ts.begin(), ts.end());
    }
  }
  for (const std::string& w : words) {
    std::vector<Term> ts = lex_tokens(w);
    toks.insert(toks.end(), ts.begin(), ts.end());
  }
  return toks;
}

const Constraint* find_start(const Engine& eng, const CompiledGrammar& cg,
                             std::size_t n) {
  if (!cg.has_start) return nullptr;
  const Store& st = eng.store();
  for (ConstraintId id = 1; id < st.next_id(); ++id) {
    if (!st.alive(id)) continue;
    const Constraint& c = st.get(id);
    if (c.functor != cg.start || c.arity() != cg.start_arity) continue;
    Term lo = eng.bindings().resolve(c.args[c.arity() - 2]);
    Term hi = eng.bindings().resolve(c.args[c.arity() - 1]);
    if (lo.is_int() && lo.int_value() == 0 && hi.is_int() &&
        hi.int_value() == static_cast<std::int64_t>(n))
      return &c;
  }
  return nullptr;
}

void print_stats(const Engine& eng, std::ostream& err) {
  const EngineStats& s = eng.stats();
  err << "fired=" << s.fired << " inserted=" << s.inserted
      << " killed=" << s.killed << " attempts=" << s.attempts
      << " choice_points=" << s.choice_points << " backtracks=" << s.backtracks
      << '\n';
}

int cmd_compile(const GrammarOpts& g, std::ostream& out, std::ostream& err) {
  CompiledGrammar cg = load(g, err);
  out << cg.program.dump();
  err << "compiled " << cg.program.size() << " rules";
  if (cg.has_start)
    err << ", start " << symbol_table::name(cg.start) << '/' << cg.start_arity;
  err << '\n';
  return 0;
}

int cmd_parse(const GrammarOpts& g, const std::vector<std::string>& words,
              const std::string& token_file, bool eof, bool trace, bool stats,
              std::ostream& out, std::ostream& err) {
  CompiledGrammar cg = load(g, err);
  std::vector<Term> toks = gather_tokens(words, token_file);
  Engine eng(cg.program);
  if (trace) eng.set_trace(&err);
  bool ok = eng.run(tokenize(toks, eof || cg.wants_eof), cg.final_goal);
  if (stats) print_stats(eng, err);
  if (!ok) {
    out << "FAIL\n";
    return 3;
  }
  out << eng.dump_store();
  if (const Constraint* c = find_start(eng, cg, toks.size())) {
    out << "ACCEPT " << print_term(eng.bindings().resolve(c->as_term())) << '\n';
    return 0;
  }
  out << "ROBUST-PARTIAL";
  bool first = true;
  for (ConstraintId id = 1; id < eng.store().next_id(); ++id) {
    if (!eng.store().alive(id)) continue;
    const Constraint& c = eng.store().get(id);
    if (!cg.nonterminal_keys.count(functor_key(c.functor, c.arity()))) continue;
    out << (first ? " " : ", ")
        << print_term(eng.bindings().resolve(c.as_term()));
    first = false;
  }
  out << '\n';
  return 0;
}

int cmd_solutions(const GrammarOpts& g, const std::vector<std::string>& words,
                  const std::string& token_file, bool eof, std::size_t limit,
                  bool trace, std::ostream& out, std::ostream& err) {
  CompiledGrammar cg = load(g, err);
  std::vector<Term> toks = gather_tokens(words, token_file);
  Engine eng(cg.program);
  if (trace) eng.set_trace(&err);
  std::set<std::string> seen;
  std::size_t printed = 0;
  std::size_t branches = eng.run_solutions(
      tokenize(toks, eof || cg.wants_eof), cg.final_goal, limit,
      [&](const Engine& e) {
        std::string s = e.dump_store();
        if (!seen.insert(s).second) return;
        ++printed;
        out << "solution " << printed << ":\n" << s << '\n';
      });
  if (branches == 0) {
    out << "FAIL\n";
    return 3;
  }
  out << "solutions: " << printed << '\n';
  return 0;
}

std::vector<std::size_t> parse_lengths(const std::string& spec) {
  std::vector<std::size_t> out;
  std::size_t dots = spec.find("..");
  if (dots != std::string::npos) {
    std::size_t lo = std::stoul(spec.substr(0, dots));
    std::string rest = spec.substr(dots + 2);
    std::size_t step = 1;
    std::size_t dots2 = rest.find("..");
    std::size_t hi;
    if (dots2 != std::string::npos) {
      hi = std::stoul(rest.substr(0, dots2));
      step = std::max<std::size_t>(1, std::stoul(rest.substr(dots2 + 2)));
    } else {
      hi = std::stoul(rest);
    }
    for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  } else {
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ','))
      if (!part.empty()) out.push_back(std::stoul(part));
  }
  if (out.empty()) throw EngineError("empty length list: " + spec);
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

int cmd_bench(const GrammarOpts& g, const std::string& lens, std::size_t samples,
              const std::string& alphabet, std::size_t reps, std::uint64_t seed,
              unsigned threads, std::ostream& out, std::ostream& err) {
  CompiledGrammar cg = load(g, err);
  BenchConfig config;
  config.lengths = parse_lengths(lens);
  for (std::size_t i = 0; i + 1 < config.lengths.size(); ++i)
    if (config.lengths[i + 1] <= config.lengths[i])
      throw EngineError("benchmark lengths must be strictly increasing");
  config.samples = samples;
  config.alphabet = split_csv(alphabet);
  config.repetitions = reps;
  config.seed = seed;
  config.threads = threads;
  if (config.alphabet.empty()) throw EngineError("empty alphabet");
  BenchReport report = run_bench(cg, config);
  out << "# n store time_ms\n";
  for (const BenchRow& r : report.rows) {
    out << r.length << ' ' << std::fixed << std::setprecision(1) << r.mean_store
        << ' ' << std::setprecision(4) << r.mean_ms;
    if (r.failures) out << " failures=" << r.failures;
    out << '\n';
  }
  out << "slope " << std::fixed << std::setprecision(2) << report.slope << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"CHR grammar toolkit"};
  app.require_subcommand(1);

  GrammarOpts g_compile, g_parse, g_solutions, g_bench;
  std::vector<std::string> words_parse, words_solutions;
  std::string file_parse, file_solutions;
  bool eof_parse = false, trace_parse = false, stats_parse = false;
  bool eof_solutions = false, trace_solutions = false;
  std::size_t limit = 10;
  std::string lens = "8..24", alphabet = "a,b";
  std::size_t samples = 5, reps = 3;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  CLI::App* sc_compile =
      app.add_subcommand("compile", "compile a grammar and print its rules");
  add_grammar_opts(sc_compile, g_compile);

  CLI::App* sc_parse =
      app.add_subcommand("parse", "parse a token string bottom-up");
  add_grammar_opts(sc_parse, g_parse);
  sc_parse->add_option("tokens", words_parse, "input tokens");
  sc_parse->add_option("--file", file_parse, "token file, one token per line");
  sc_parse->add_flag("--eof", eof_parse, "append the eof sentinel token");
  sc_parse->add_flag("--trace", trace_parse, "trace rule firings to stderr");
  sc_parse->add_flag("--stats", stats_parse, "print engine counters to stderr");

  CLI::App* sc_solutions = app.add_subcommand(
      "solutions", "enumerate alternative final stores by backtracking");
  add_grammar_opts(sc_solutions, g_solutions);
  sc_solutions->add_option("tokens", words_solutions, "input tokens");
  sc_solutions->add_option("--file", file_solutions,
                           "token file, one token per line");
  sc_solutions->add_flag("--eof", eof_solutions, "append the eof sentinel token");
  sc_solutions->add_flag("--trace", trace_solutions,
                         "trace rule firings to stderr");
  sc_solutions->add_option("--limit", limit,
                           "maximum solution branches to explore");

  CLI::App* sc_bench = app.add_subcommand(
      "bench", "time parses of random strings and fit a growth exponent");
  add_grammar_opts(sc_bench, g_bench);
  sc_bench->add_option("--lens", lens, "lengths: lo..hi, lo..hi..step, or csv");
  sc_bench->add_option("--samples", samples, "random strings per length");
  sc_bench->add_option("--alphabet", alphabet, "csv of terminal tokens");
  sc_bench->add_option("--reps", reps, "timed runs per sample (median kept)");
  sc_bench->add_option("--seed", seed, "random seed");
  sc_bench->add_option("--threads", threads, "worker threads (one engine each)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const GrammarOpts* active = &g_compile;
  if (sc_parse->parsed()) active = &g_parse;
  if (sc_solutions->parsed()) active = &g_solutions;
  if (sc_bench->parsed()) active = &g_bench;

  try {
    if (sc_compile->parsed()) return cmd_compile(g_compile, out, err);
    if (sc_parse->parsed())
      return cmd_parse(g_parse, words_parse, file_parse, eof_parse, trace_parse,
                       stats_parse, out, err);
    if (sc_solutions->parsed())
      return cmd_solutions(g_solutions, words_solutions, file_solutions,
                           eof_solutions, limit, trace_solutions, out, err);
    if (sc_bench->parsed())
      return cmd_bench(g_bench, lens, samples, alphabet, reps, seed, threads,
                       out, err);
  } catch (const EmptyProductionError& e) {
    err << "error: " << active->file << ':' << e.line << ':' << e.col << ": "
        << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << active->file << ':' << e.line << ':' << e.col << ": "
        << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace chrg
