// lamfin: finiteness of languages of nondeterministic recursion schemes.
//
//   lamfin check FILE          exit 0 FINITE, 1 INFINITE
//   lamfin derive FILE --target T [--min-counter c]
//   lamfin validate FILE DERIVATION.json
//   lamfin enumerate FILE --max-size n
//   lamfin bohm FILE --depth-fuel d
//   lamfin growth FILE --sizes 4,10,20
//
// Input errors exit 2, an exhausted search budget exits 3.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lamfin/engine.hpp"
#include "lamfin/export.hpp"
#include "lamfin/oracle.hpp"
#include "lamfin/scheme.hpp"

using namespace lamfin;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct Config {
  std::string input;
  std::string format = "text";
  std::string target;
  std::string derivation;
  std::uint64_t min_counter = 0;
  std::size_t max_size = 10;
  unsigned depth_fuel = Fuel{}.depth;
  std::uint64_t step_fuel = Fuel{}.steps;
  std::uint64_t budget = EngineOptions{}.budget;
  unsigned threads = 1;
  std::vector<std::size_t> sizes{4, 10, 20};
  bool verbose = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EngineOptions engine_options(const Config& c) { return EngineOptions{c.budget, c.threads}; }
Fuel fuel(const Config& c) { return Fuel{c.depth_fuel, c.step_fuel}; }

int cmd_check(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  if (!f.term->sort.is_base()) throw std::invalid_argument("check needs a program of sort o");
  TermGraph g = TermGraph::unfold(*f.term);
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = decide_finiteness(g, engine_options(c));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.format == "json") {
    std::cout << verdict_to_json(g, v).dump(2) << "\n";
  } else {
    std::cout << to_string(v.kind) << "\n";
    std::cout << "complexity " << v.order << ", " << v.stats.skeletons << " skeletons, " << v.stats.instances
              << " rule instances\n";
    if (v.witness) {
      const Derivation& a = at_path(*v.witness->derivation, v.witness->ancestor);
      const Derivation& d = at_path(*v.witness->derivation, v.witness->descendant);
      std::cout << "pump: " << a.conclusion.env.str(&g) << " ⊢ " << g.print(a.conclusion.subject) << " : "
                << a.conclusion.type.str() << " with counter " << a.conclusion.counter << " above "
                << d.conclusion.counter << " (section depth " << v.witness->descendant.size() - v.witness->ancestor.size()
                << ")\n";
    } else if (!v.root_derivable) {
      std::cout << "the language is empty\n";
    } else {
      std::cout << "largest root counter " << *v.max_counter;
      if (v.size_bound) std::cout << ", trees have at most " << *v.size_bound << " nodes";
      std::cout << "\n";
    }
    std::cout << "time " << secs << " s\n";
  }
  return v.kind == Verdict::Kind::Finite ? 0 : 1;
}

int cmd_derive(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  TermGraph g = TermGraph::unfold(*f.term);
  FullType target = parse_full_type(c.target);
  Format fmt = parse_format(c.format);
  DerivationPtr d = find_derivation(g, g.root(), target, c.min_counter, engine_options(c));
  if (!d) {
    std::cout << "NOT FOUND\n";
    return 1;
  }
  std::cout << export_derivation(g, *d, fmt);
  return 0;
}

int cmd_validate(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  TermGraph g = TermGraph::unfold(*f.term);
  DerivationPtr d = derivation_from_json(g, json::parse(read_file(c.derivation)));
  ValidationReport r = validate(g, *d);
  if (r.ok) {
    std::cout << "valid, counter " << d->conclusion.counter << "\n";
    return 0;
  }
  std::cout << "invalid: " << to_string(r.code) << " at [";
  for (std::size_t i = 0; i < r.where.size(); ++i) std::cout << (i ? "," : "") << r.where[i];
  std::cout << "]: " << r.message << "\n";
  return 1;
}

int cmd_enumerate(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  Language l = language_upto(f.term, c.max_size, fuel(c));
  if (c.format == "json") {
    json trees = json::array();
    for (const auto& t : l.trees) trees.push_back(t.str());
    std::cout << json{{"max_size", c.max_size}, {"trees", trees}, {"complete", l.complete}}.dump(2) << "\n";
  } else {
    for (const auto& t : l.trees) std::cout << t.str() << "\n";
    std::cout << "# " << l.trees.size() << " trees, " << (l.complete ? "complete" : "possibly incomplete") << "\n";
  }
  return 0;
}

int cmd_bohm(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  std::cout << bohm_expand(f.term, fuel(c)).str() << "\n";
  return 0;
}

int cmd_growth(const Config& c) {
  TermFile f = load_program(read_file(c.input));
  std::vector<GrowthStep> schedule;
  for (std::size_t s : c.sizes) schedule.push_back({s, fuel(c)});
  std::cout << growth_report_jsonl(growth_report(f.term, schedule));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decides finiteness of the tree language of a nondeterministic recursion scheme"};
  app.require_subcommand(1);
  Config c;
  app.add_flag("-v,--verbose", c.verbose, "report the command and its wall time on stderr");

  auto input = [&](CLI::App* sub) { sub->add_option("file", c.input, "scheme or term s-expression")->required(); };
  auto engine = [&](CLI::App* sub) {
    sub->add_option("--budget", c.budget, "search budget in rule instances")->check(CLI::PositiveNumber);
    sub->add_option("--threads", c.threads, "saturation threads")->check(CLI::PositiveNumber);
  };
  auto fuels = [&](CLI::App* sub) {
    sub->add_option("--depth-fuel", c.depth_fuel, "Böhm tree depth limit")->check(CLI::PositiveNumber);
    sub->add_option("--step-fuel", c.step_fuel, "head reduction steps per node")->check(CLI::PositiveNumber);
  };

  CLI::App* check = app.add_subcommand("check", "decide finiteness; exit 0 FINITE, 1 INFINITE");
  input(check);
  engine(check);
  check->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CLI::App* derive = app.add_subcommand("derive", "find a derivation for the whole term");
  input(derive);
  engine(derive);
  derive->add_option("--target", c.target, "full type, e.g. (2,{},{0,1},o)")->required();
  derive->add_option("--min-counter", c.min_counter, "least flag counter");
  derive->add_option("--format", c.format, "text, json or dot")->check(CLI::IsMember({"text", "json", "dot"}));

  CLI::App* val = app.add_subcommand("validate", "re-check a derivation in json form");
  input(val);
  val->add_option("derivation", c.derivation, "derivation json")->required();

  CLI::App* en = app.add_subcommand("enumerate", "list the trees of the language up to a size");
  input(en);
  fuels(en);
  en->add_option("--max-size", c.max_size, "largest tree size")->check(CLI::PositiveNumber);
  en->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CLI::App* bohm = app.add_subcommand("bohm", "print a prefix of the Böhm tree");
  input(bohm);
  fuels(bohm);

  CLI::App* growth = app.add_subcommand("growth", "largest tree found per size limit, as json lines");
  input(growth);
  fuels(growth);
  growth->add_option("--sizes", c.sizes, "size limits")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  auto dispatch = [&]() -> int {
    if (*check) return cmd_check(c);
    if (*derive) return cmd_derive(c);
    if (*val) return cmd_validate(c);
    if (*en) return cmd_enumerate(c);
    if (*bohm) return cmd_bohm(c);
    if (*growth) return cmd_growth(c);
    return kExitInput;
  };
  try {
    auto t0 = std::chrono::steady_clock::now();
    int rc = dispatch();
    if (c.verbose)
      std::cerr << "lamfin: " << app.get_subcommands().front()->get_name() << " " << c.input << " exit " << rc
                << " after " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                << " s\n";
    return rc;
  } catch (const BudgetExhausted& e) {
    std::cerr << "lamfin: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "lamfin: " << e.what() << "\n";
    return kExitInput;
  }
}
