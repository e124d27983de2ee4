// Command-line front end: solve, compile, verify, tables, count.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cvd/approx.hpp"
#include "cvd/compiler.hpp"
#include "cvd/expression.hpp"
#include "cvd/fock.hpp"
#include "cvd/rewrite.hpp"
#include "json.hpp"

using namespace cvd;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kBudget = 3;
constexpr int kVerify = 4;

struct Output {
  std::string dir;
  std::string format = "json";

  // Writes to <dir>/<name>.<ext> when --out is set, else to stdout.
  void emit(const std::string& name, const std::string& json_text, const std::string& csv_text = "") const {
    const bool csv = format == "csv" && !csv_text.empty();
    const std::string& text = csv ? csv_text : json_text;
    if (dir.empty()) {
      std::cout << text << (text.empty() || text.back() != '\n' ? "\n" : "");
      return;
    }
    fs::create_directories(dir);
    fs::path p = fs::path(dir) / (name + (csv ? ".csv" : ".json"));
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text << "\n";
    std::cerr << "wrote " << p.string() << "\n";
  }
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// "@file" reads the expression from a file.
QuadPolynomial read_hamiltonian(const std::string& arg) {
  return parse_polynomial(!arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg);
}

SchemeFamily parse_family(const std::string& f) {
  if (f == "comm" || f == "commutation") return SchemeFamily::Commutation;
  if (f == "nested") return SchemeFamily::Nested;
  throw std::invalid_argument("unknown family '" + f + "' (comm|nested)");
}

std::string verify_csv(const std::vector<VerifyRow>& rows) {
  std::ostringstream o;
  o << "name,N,d,distance,threshold,pass\n";
  for (const auto& r : rows)
    o << r.name << "," << r.n << "," << r.d << "," << r.distance << "," << r.threshold << "," << (r.pass ? 1 : 0)
      << "\n";
  return o.str();
}

nlohmann::json report_json(const VerifyReport& r) {
  nlohmann::json j{{"target_error", r.target_error},
                   {"max_other", r.max_other},
                   {"order_residuals", r.order_residuals},
                   {"error_coefficient", r.error_coefficient}};
  nlohmann::json next = nlohmann::json::array();
  for (const auto& [b, v] : r.next_order) next.push_back({b, v});
  j["next_order"] = next;
  return j;
}

// --- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string family = "comm";
  int order = 4;
  int rows = 0;
  std::vector<std::string> pins;
  unsigned long seed = 42;
  int paths = 64;
  int threads = 0;
  std::string starts;
  std::string table;
};

int run_solve(const SolveArgs& a, const Output& out) {
  if (!a.table.empty()) {
    NewtonResult info;
    ApproximationScheme s = refine_scheme(printed_table(a.table), &info);
    nlohmann::json j = nlohmann::json::parse(scheme_to_json(s));
    j["newton"] = {{"converged", info.converged}, {"residual", info.residual}, {"iterations", info.iterations}};
    out.emit("scheme-" + s.name, j.dump(2));
    return info.converged ? kOk : kVerify;
  }
  SchemeFamily fam = parse_family(a.family);
  int rows = a.rows > 0 ? a.rows : (a.order <= 4 ? 5 : 8);
  std::map<std::string, Rational> pins;
  if (fam == SchemeFamily::Commutation)
    pins = {{"c1", Rational(6, 5)}, {"c1'", Rational(-1)}};
  else
    pins = {{"c1", Rational(0)}, {"c1'", Rational(1, 2)}};
  for (const auto& p : a.pins) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("pin must be name=value: " + p);
    pins[p.substr(0, eq)] = parse_rational(p.substr(eq + 1));
  }
  Ansatz ansatz = Ansatz::alternating(rows, pins);
  ConstraintSystem cs = build_system(ansatz, family_target(fam), a.order);
  HomotopyOptions opt;
  opt.paths = a.paths;
  opt.threads = a.threads;
  if (!a.starts.empty()) opt.starts = nlohmann::json::parse(read_file(a.starts)).get<std::vector<std::vector<double>>>();
  HomotopyResult res = homotopy_solve(cs, a.seed, opt);
  nlohmann::json j;
  std::map<std::string, int> tally;
  for (const auto& p : res.paths) ++tally[p.status];
  j["paths"] = tally;
  j["unknowns"] = cs.unknowns;
  j["constraints"] = cs.size();
  if (res.real_solutions.empty()) {
    j["solution"] = nullptr;
    out.emit("solve", j.dump(2));
    std::cerr << "no real solution found\n";
    return kVerify;
  }
  const auto& x = res.real_solutions[select_solution(res.real_solutions)];
  std::vector<std::pair<double, double>> table;
  std::map<std::string, double> values;
  for (std::size_t i = 0; i < cs.unknowns.size(); ++i) values[cs.unknowns[i]] = x[i];
  for (int r = 1; r <= rows; ++r) {
    auto get = [&](const std::string& n) {
      auto pin = pins.find(n);
      return pin != pins.end() ? pin->second.get_d() : values.at(n);
    };
    table.push_back({get("c" + std::to_string(r)), get("c" + std::to_string(r) + "'")});
  }
  ApproximationScheme s = scheme_from_rows((fam == SchemeFamily::Commutation ? "comm" : "nested") +
                                               std::to_string(a.order) + "-solved",
                                           fam, a.order, table, "full");
  VerifyReport v = verify_scheme(s);
  s.error_coefficient = v.error_coefficient;
  j["scheme"] = nlohmann::json::parse(scheme_to_json(s));
  j["verify"] = report_json(v);
  j["real_solutions"] = res.real_solutions.size();
  out.emit("solve", j.dump(2));
  return v.max_residual() < 1e-8 ? kOk : kVerify;
}

// --- compile ----------------------------------------------------------------

struct CompileArgs {
  std::string hamiltonian;
  double t = 0.1;
  double budget = 1e-3;
  int split_order = 2;
  int max_rescale = 64;
  bool verify = false;
  int fock_dim = 0;
  int subspace = 6;
  double threshold = 0.0;
};

int default_dim(int modes) { return modes > 1 ? 24 : 64; }

int run_compile(const CompileArgs& a, const Output& out) {
  QuadPolynomial h = read_hamiltonian(a.hamiltonian);
  CompileOptions opt;
  opt.split_order = a.split_order;
  opt.max_rescale = a.max_rescale;
  CompileResult r = compile(h, a.t, a.budget, opt);
  out.emit("sequence", r.sequence.to_json(), r.sequence.to_csv());
  out.emit("report", r.report.to_json());
  if (!a.verify) return kOk;
  int n = a.fock_dim > 0 ? a.fock_dim : default_dim(r.sequence.n_modes);
  double threshold = a.threshold > 0 ? a.threshold : 1.0;
  VerifyRow row = verify_sequence("compiled", r.sequence, h, a.t, n, a.subspace, threshold);
  out.emit("verify", to_json({row}), verify_csv({row}));
  if (!row.warning.empty()) std::cerr << "warning: " << row.warning << "\n";
  return a.threshold > 0 && !row.pass ? kVerify : kOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string identity = "all";
  std::string sequence;
  std::string hamiltonian;
  double t = 0.2;
  int fock_dim = 0;
  int subspace = 6;
  double threshold = 1e-5;
};

int run_verify(const VerifyArgs& a, const Output& out) {
  std::vector<VerifyRow> rows;
  if (!a.sequence.empty()) {
    if (a.hamiltonian.empty()) throw std::invalid_argument("--sequence needs --hamiltonian");
    GateSequence s = gate_sequence_from_json(read_file(a.sequence));
    int n = a.fock_dim > 0 ? a.fock_dim : default_dim(s.n_modes);
    rows.push_back(verify_sequence(a.sequence, s, read_hamiltonian(a.hamiltonian), a.t, n, a.subspace, a.threshold));
  } else {
    std::vector<std::string> names = a.identity == "all" ? identity_names() : std::vector<std::string>{a.identity};
    for (const auto& name : names) {
      int n = a.fock_dim > 0 ? a.fock_dim : default_dim(name == "pdc" ? 2 : 1);
      rows.push_back(verify_identity(name, a.t, n, a.subspace, a.threshold));
    }
  }
  out.emit("verify", to_json(rows), verify_csv(rows));
  bool ok = true;
  for (const auto& r : rows) {
    if (!r.warning.empty()) std::cerr << "warning: " << r.name << ": " << r.warning << "\n";
    ok = ok && r.pass;
  }
  return ok ? kOk : kVerify;
}

// --- tables -----------------------------------------------------------------

int run_tables(const std::string& which, bool export_fixtures, const Output& out) {
  std::vector<std::string> firsts = {"I", "II", "IV", "V"};
  std::vector<std::string> names = which == "all" ? std::vector<std::string>{"I", "II", "III", "IV", "V", "VI"}
                                                  : std::vector<std::string>{which};
  nlohmann::json j = nlohmann::json::object();
  std::ostringstream csv;
  csv << "table,order,max_residual,error_coefficient,gate_count\n";
  bool ok = true;
  for (const auto& name : names) {
    if (name == "III" || name == "VI") {
      auto base = library_scheme(name == "III" ? "comm5" : "nested5");
      ApproximationScheme s = second_step_compose(base, printed_pattern(name), 9);
      VerifyReport v = verify_scheme(s, 0);
      j[name] = {{"scheme", s.name}, {"gate_count", s.gate_count()}, {"merged_gate_count", s.merged_gate_count()},
                 {"error_coefficient", s.error_coefficient}, {"verify", report_json(v)}};
      csv << name << "," << s.order << "," << v.max_residual() << "," << s.error_coefficient << ","
          << s.gate_count() << "\n";
      ok = ok && v.max_residual() < 1e-8;
      continue;
    }
    if (std::find(firsts.begin(), firsts.end(), name) == firsts.end())
      throw std::invalid_argument("unknown table '" + name + "'");
    ApproximationScheme printed = printed_table(name);
    VerifyReport v = verify_scheme(printed);
    printed.error_coefficient = v.error_coefficient;
    NewtonResult info;
    ApproximationScheme refined = refine_scheme(printed, &info);
    double drift = 0.0;
    for (std::size_t i = 0; i < printed.factors.size(); ++i)
      drift = std::max(drift, std::abs(printed.factors[i].coefficient - refined.factors[i].coefficient));
    j[name] = {{"printed", report_json(v)},
               {"refined_residual", info.residual},
               {"max_drift", drift},
               {"gate_count", printed.gate_count()}};
    csv << name << "," << printed.order << "," << v.max_residual() << "," << v.error_coefficient << ","
        << printed.gate_count() << "\n";
    ok = ok && v.max_residual() < 1e-3 && info.residual < 1e-10 && drift < 1e-4;
    if (export_fixtures) {
      Output fixture{out.dir.empty() ? "data/schemes" : out.dir, "json"};
      std::string lower = name;
      for (auto& c : lower) c = static_cast<char>(std::tolower(c));
      fixture.emit("table-" + lower, scheme_to_json(printed));
    }
  }
  if (!export_fixtures) out.emit("tables", j.dump(2), csv.str());
  return ok ? kOk : kVerify;
}

// --- count ------------------------------------------------------------------

struct CountArgs {
  std::string naive;
  double strength = 0.1;
  double budget = 1e-3;
  std::string hamiltonian;
  double t = 0.1;
};

int run_count(const CountArgs& a, const Output& out) {
  nlohmann::json j;
  if (!a.naive.empty()) {
    NaiveKind k = parse_family(a.naive) == SchemeFamily::Nested ? NaiveKind::Nested : NaiveKind::Commutation;
    j["naive_count"] = naive_count(k, a.strength, a.budget);
    j["strength"] = a.strength;
  }
  if (!a.hamiltonian.empty()) {
    CompileResult r = compile(read_hamiltonian(a.hamiltonian), a.t, a.budget);
    j["elementary_count"] = r.report.elementary_count;
    j["fourier_count"] = r.report.fourier_count;
    j["total"] = r.report.total;
    j["naive_count"] = r.report.naive_count;
  }
  if (j.is_null()) throw std::invalid_argument("count needs --naive or --hamiltonian");
  j["budget"] = a.budget;
  out.emit("count", j.dump(2));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose exponentials of bosonic polynomial Hamiltonians into elementary CV gates"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  app.fallthrough();
  Output out;
  app.add_option("--out", out.dir, "Write results into this directory");
  app.add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a first-step scheme by homotopy or refine a printed table");
  solve->add_option("--family", sa.family, "comm or nested");
  solve->add_option("--order", sa.order, "Approximation order")->check(CLI::Range(2, 6));
  solve->add_option("--rows", sa.rows, "Coefficient rows of the alternating ansatz");
  solve->add_option("--pin", sa.pins, "Pinned coefficient, e.g. c1=6/5");
  solve->add_option("--seed", sa.seed, "Random seed for start points");
  solve->add_option("--paths", sa.paths, "Number of homotopy paths");
  solve->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");
  solve->add_option("--starts", sa.starts, "JSON file with explicit real start points");
  solve->add_option("--table", sa.table, "Refine a printed table instead (I, II, IV, V)");

  CompileArgs ca;
  auto* comp = app.add_subcommand("compile", "Compile e^{i t H} into a gate sequence");
  comp->add_option("--hamiltonian", ca.hamiltonian, "Polynomial, or @file")->required();
  comp->add_option("--t", ca.t, "Interaction time");
  comp->add_option("--budget", ca.budget, "Per-stage error budget");
  comp->add_option("--order", ca.split_order, "Splitting order (1 or 2)")->check(CLI::IsMember({1, 2}));
  comp->add_option("--max-rescale", ca.max_rescale, "Largest rescaling factor");
  comp->add_flag("--verify", ca.verify, "Also measure the Fock-space distance to the target");
  comp->add_option("--fock-dim", ca.fock_dim, "Fock truncation per mode");
  comp->add_option("--subspace", ca.subspace, "Low levels per mode in the distance");
  comp->add_option("--threshold", ca.threshold, "Fail with exit code 4 above this distance");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Check gate identities or a sequence in truncated Fock space");
  ver->add_option("--identity", va.identity, "fourier, x2, pdc, conjugation or all");
  ver->add_option("--sequence", va.sequence, "Gate sequence JSON to check against --hamiltonian");
  ver->add_option("--hamiltonian", va.hamiltonian, "Target polynomial for --sequence");
  ver->add_option("--t", va.t, "Strength (identities) or time (sequence)");
  ver->add_option("--fock-dim", va.fock_dim, "Fock truncation per mode (default 64, 24 for two modes)");
  ver->add_option("--subspace", va.subspace, "Low levels per mode");
  ver->add_option("--threshold", va.threshold, "Pass threshold");

  std::string which = "all";
  bool export_fixtures = false;
  auto* tab = app.add_subcommand("tables", "Verify and refine the printed coefficient tables");
  tab->add_option("--which", which, "I, II, III, IV, V, VI or all");
  tab->add_flag("--export", export_fixtures, "Write the printed first-step tables as scheme JSON");

  CountArgs na;
  auto* cnt = app.add_subcommand("count", "Operation counts, compiled and naive");
  cnt->add_option("--naive", na.naive, "comm or nested: naive count at --strength");
  cnt->add_option("--strength", na.strength, "Target strength for --naive");
  cnt->add_option("--budget", na.budget, "Error budget");
  cnt->add_option("--hamiltonian", na.hamiltonian, "Compile and count this polynomial");
  cnt->add_option("--t", na.t, "Interaction time for --hamiltonian");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*solve) return run_solve(sa, out);
    if (*comp) return run_compile(ca, out);
    if (*ver) return run_verify(va, out);
    if (*tab) return run_tables(which, export_fixtures, out);
    if (*cnt) return run_count(na, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kParse;
  } catch (const BudgetError& e) {
    std::cerr << "budget unreachable: " << e.what() << "\n";
    return kBudget;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << "\n";
    return kParse;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
