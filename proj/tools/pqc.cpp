// pqc: check, run and simulate .pqc programs.
//
// Exit status: 0 on success, 1 for type, runtime or simulation errors,
// 2 for parse, IO and signature errors.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pqc/eval.hpp"
#include "pqc/export.hpp"
#include "pqc/oracle.hpp"
#include "pqc/syntax.hpp"
#include "pqc/typecheck.hpp"

namespace {

using namespace pqc;

enum Exit { kOk = 0, kError = 1, kInputError = 2 };

struct CliConfig {
  std::string command;
  std::string path;
  std::string gates_path;
  std::string format = "json";
  std::string out_path;
  std::string main_name = "main";
  int max_wires = kDefaultWireCap;
  bool unchecked = false;
};

/// Thrown to unwind with a diagnostic already printed.
struct Abort {
  int status;
};

class Driver {
 public:
  explicit Driver(CliConfig cfg) : cfg_(std::move(cfg)) {}

  int run() {
    try {
      load_gates();
      load_program();
      if (cfg_.command == "check") return check();
      if (cfg_.command == "run") return run_program();
      return sim();
    } catch (const Abort& a) {
      return a.status;
    }
  }

 private:
  [[noreturn]] void fail(int status, const std::string& code, Span span, const std::string& msg,
                         const std::string& where = "") {
    report(code, span, msg, where);
    throw Abort{status};
  }

  void report(const std::string& code, Span span, const std::string& msg,
              const std::string& where = "") const {
    const std::string& file = where.empty() ? cfg_.path : where;
    std::cerr << file << ":";
    if (span.known()) std::cerr << span.line << ":" << span.column << ":";
    std::cerr << " error[" << code << "]: " << msg << "\n";
  }

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kInputError, "E-IO", {}, "cannot read file", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void load_gates() {
    std::string path = cfg_.gates_path;
    if (path.empty())
      if (const char* env = std::getenv("PQC_GATES")) path = env;
    if (path.empty()) {
      gates_ = default_gateset();
      return;
    }
    try {
      gates_ = load_signature(read(path));
    } catch (const SignatureError& e) {
      fail(kInputError, "E-SIG", {}, e.what(), path);
    }
  }

  void load_program() {
    std::string src = read(cfg_.path);
    try {
      program_ = parse_program(src);
    } catch (const SourceError& e) {
      fail(kInputError, e.code(), e.span(), e.what());
    }
    try {
      program_ = elaborate_gates(program_, gates_);
    } catch (const SourceError& e) {
      fail(kError, e.code(), e.span(), e.what());
    }
  }

  ProgramTyping typecheck() {
    ProgramTyping t = check_program(program_, gates_);
    for (const auto& d : t.errors) report(d.code, d.span, d.message);
    if (!t.ok()) throw Abort{kError};
    return t;
  }

  int check() {
    for (const auto& d : typecheck().defs)
      std::cout << d.name << " : " << print_type(*d.type) << " [modality " << d.modality
                << "]\n";
    return kOk;
  }

  RunResult evaluate() {
    if (!cfg_.unchecked) typecheck();
    try {
      return run_main(program_, gates_, cfg_.main_name);
    } catch (const RuntimeError& e) {
      fail(kError, to_string(e.kind), {}, e.what());
    } catch (const Error& e) {
      fail(kError, "RuntimeError", {}, e.what());
    }
  }

  void emit(const std::string& text) {
    if (cfg_.out_path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(cfg_.out_path, std::ios::binary);
    if (!out || !(out << text)) fail(kInputError, "E-IO", {}, "cannot write file", cfg_.out_path);
  }

  int run_program() {
    RunResult r = evaluate();
    if (!r.circuit) {
      emit(print_term(*r.value) + "\n");
      return kOk;
    }
    emit(cfg_.format == "ascii" ? to_ascii(*r.circuit) : to_json(*r.circuit) + "\n");
    return kOk;
  }

  int sim() {
    RunResult r = evaluate();
    if (!r.circuit)
      fail(kError, "E-SIM", {}, "'" + cfg_.main_name + "' is not a circuit: " + print_term(*r.value));
    LinearMap m;
    try {
      m = circuit_to_map(*r.circuit, cfg_.max_wires);
    } catch (const OracleError& e) {
      fail(kError, to_string(e.kind()), {}, e.what());
    }
    std::cout << print_matrix(m);
    return kOk;
  }

  static std::string number(double x) {
    if (std::abs(x) < 5e-13) x = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }

  static std::string entry(std::complex<double> z) {
    double re = std::abs(z.real()) < 5e-13 ? 0.0 : z.real();
    double im = std::abs(z.imag()) < 5e-13 ? 0.0 : z.imag();
    if (im == 0.0) return number(re);
    std::string i = number(im) + "i";
    if (re == 0.0) return i;
    return number(re) + (im > 0 ? "+" : "") + i;
  }

  static std::string print_matrix(const LinearMap& m) {
    std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(m.rows()));
    std::size_t w = 1;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        cells[static_cast<std::size_t>(r)].push_back(entry(m(r, c)));
        w = std::max(w, cells[static_cast<std::size_t>(r)].back().size());
      }
    std::string out;
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) line += "  ";
        line += std::string(w - row[c].size(), ' ') + row[c];
      }
      out += line + "\n";
    }
    return out;
  }

  CliConfig cfg_;
  GateSet gates_;
  Program program_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check, run and simulate quantum circuit programs."};
  app.require_subcommand(1);
  CliConfig cfg;
  app.add_option("--gates", cfg.gates_path, "Gate signature file (JSON); defaults to $PQC_GATES");

  auto* check = app.add_subcommand("check", "Typecheck and print each definition's type");
  check->add_option("FILE", cfg.path)->required();

  auto* run = app.add_subcommand("run", "Evaluate a definition and export its circuit");
  run->add_option("FILE", cfg.path)->required();
  run->add_option("--main", cfg.main_name, "Definition to evaluate");
  run->add_option("--format", cfg.format, "Circuit output format")
      ->check(CLI::IsMember({"json", "ascii"}));
  run->add_option("--out", cfg.out_path, "Write the circuit here instead of stdout");
  run->add_flag("--unchecked", cfg.unchecked, "Skip the typechecker");

  auto* sim = app.add_subcommand("sim", "Print the matrix of the resulting circuit");
  sim->add_option("FILE", cfg.path)->required();
  sim->add_option("--main", cfg.main_name, "Definition to evaluate");
  sim->add_option("--max-wires", cfg.max_wires, "Largest wire count to simulate")
      ->check(CLI::Range(1, 16));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int status = app.exit(e);
    return status == 0 ? 0 : kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return Driver(cfg).run();
}
