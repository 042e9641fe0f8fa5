#include "vpk/smtlib.h"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vpk {

std::string SmtRational(const Rational& q) {
  const mpz_class num = abs(q.get_num());
  const mpz_class& den = q.get_den();
  std::string body = den == 1 ? num.get_str() : "(/ " + num.get_str() + " " + den.get_str() + ")";
  return sgn(q) < 0 ? "(- " + body + ")" : body;
}

namespace {

std::string Var(int t, int i) { return "s_" + std::to_string(t) + "_" + std::to_string(i); }

// Linear term sum_i a_i * s_t_i + c.
std::string Term(const std::vector<Rational>& a, const Rational& c, int t) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    const std::string v = Var(t, static_cast<int>(i));
    parts.push_back(a[i] == 1 ? v : "(* " + SmtRational(a[i]) + " " + v + ")");
  }
  if (sgn(c) != 0 || parts.empty()) parts.push_back(SmtRational(c));
  if (parts.size() == 1) return parts.front();
  std::string out = "(+";
  for (const std::string& p : parts) out += " " + p;
  return out + ")";
}

std::string Atom(const LinearConstraint& c, int t) {
  const RationalConstraint r = RationalConstraint::From(c);
  return std::string("(") + (r.strict ? "<" : "<=") + " " + Term(r.a, 0, t) + " " +
         SmtRational(r.b) + ")";
}

std::string And(const std::vector<std::string>& xs) {
  if (xs.empty()) return "true";
  if (xs.size() == 1) return xs.front();
  std::string out = "(and";
  for (const std::string& x : xs) out += " " + x;
  return out + ")";
}

std::string Or(const std::vector<std::string>& xs) {
  if (xs.empty()) return "false";
  if (xs.size() == 1) return xs.front();
  std::string out = "(or";
  for (const std::string& x : xs) out += " " + x;
  return out + ")";
}

std::string InUnion(const std::vector<Polytope>& sets, int t) {
  std::vector<std::string> terms;
  for (const Polytope& p : sets) {
    std::vector<std::string> atoms;
    for (const LinearConstraint& c : p.constraints) atoms.push_back(Atom(c, t));
    terms.push_back(And(atoms));
  }
  return Or(terms);
}

}  // namespace

std::string EncodeSmtLib(const PiecewiseAffineSystem& system, const SafetySpec& spec) {
  spec.Validate(system.dim());
  const int d = system.dim();
  const int T = spec.t_max;
  std::ostringstream out;
  out << "(set-logic QF_LRA)\n";
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < d; ++i) out << "(declare-const " << Var(t, i) << " Real)\n";
  }
  for (int t = 0; t < T; ++t) out << "(declare-fun tr_" << t << " () Bool)\n";

  std::vector<std::string> init;
  for (const LinearConstraint& c : spec.initial.constraints) init.push_back(Atom(c, 0));
  out << "(assert " << And(init) << ")\n";

  for (int t = 0; t < T; ++t) {
    std::vector<std::string> cases;
    for (const AffinePiece& piece : system.pieces()) {
      std::vector<std::string> conj;
      for (const LinearConstraint& g : piece.guard) conj.push_back(Atom(g, t));
      const RationalMatrix M = ToRationalMatrix(piece.M);
      const std::vector<Rational> c = ToRational(piece.c);
      for (int i = 0; i < d; ++i) {
        conj.push_back("(= " + Var(t + 1, i) + " " + Term(M[i], c[i], t) + ")");
      }
      cases.push_back(And(conj));
    }
    out << "(assert (= tr_" << t << " " << Or(cases) << "))\n";
  }

  // A violation at step t needs transitions 0..t-1 and, for invariant specs,
  // no earlier target visit at steps 1..t-1.
  std::vector<std::string> violations;
  std::vector<std::string> prefix;
  for (int t = 0; t <= T; ++t) {
    if (t >= 1) prefix.push_back("tr_" + std::to_string(t - 1));
    std::vector<std::string> conj = prefix;
    conj.push_back(InUnion(spec.unsafe, t));
    violations.push_back(And(conj));
    if (spec.mode == SpecMode::kInvariant && t >= 1) {
      prefix.push_back("(not " + InUnion(spec.target, t) + ")");
    }
  }
  if (spec.mode == SpecMode::kInvariant) violations.push_back(And(prefix));
  out << "(assert " << Or(violations) << ")\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprParser {
 public:
  explicit SExprParser(const std::string& text) : text_(text) {}

  bool AtEnd() {
    SkipSpace();
    return pos_ >= text_.size();
  }

  SExpr Parse() {
    SkipSpace();
    if (pos_ >= text_.size()) throw std::runtime_error("unexpected end of solver output");
    SExpr e;
    if (text_[pos_] == '(') {
      ++pos_;
      e.is_list = true;
      while (true) {
        SkipSpace();
        if (pos_ >= text_.size()) throw std::runtime_error("unbalanced solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.list.push_back(Parse());
      }
      return e;
    }
    if (text_[pos_] == ')') throw std::runtime_error("unbalanced solver output");
    if (text_[pos_] == '"' || text_[pos_] == '|') {
      const char quote = text_[pos_];
      const std::size_t end = text_.find(quote, pos_ + 1);
      if (end == std::string::npos) throw std::runtime_error("unterminated literal in solver output");
      e.atom = text_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    e.atom = text_.substr(start, pos_ - start);
    return e;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

// Numerals and decimals such as "3", "1.25" or "2.0".
Rational ParseNumber(const std::string& s) {
  const std::size_t dot = s.find('.');
  if (dot == std::string::npos) return Rational(mpz_class(s));
  const std::string frac = s.substr(dot + 1);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational q(mpz_class(s.substr(0, dot) + frac), den);
  q.canonicalize();
  return q;
}

Rational Evaluate(const SExpr& e) {
  if (!e.is_list) return ParseNumber(e.atom);
  if (e.list.empty() || e.list[0].is_list) throw std::runtime_error("unsupported model value");
  const std::string& op = e.list[0].atom;
  if (op == "-" && e.list.size() == 2) return -Evaluate(e.list[1]);
  if (op == "-" && e.list.size() == 3) return Evaluate(e.list[1]) - Evaluate(e.list[2]);
  if (op == "/" && e.list.size() == 3) return Evaluate(e.list[1]) / Evaluate(e.list[2]);
  if (op == "+") {
    Rational sum = 0;
    for (std::size_t i = 1; i < e.list.size(); ++i) sum += Evaluate(e.list[i]);
    return sum;
  }
  if (op == "*") {
    Rational prod = 1;
    for (std::size_t i = 1; i < e.list.size(); ++i) prod *= Evaluate(e.list[i]);
    return prod;
  }
  throw std::runtime_error("unsupported model value operator: " + op);
}

}  // namespace

SolverResult ParseSolverOutput(const std::string& output) {
  SolverResult result;
  result.output = output;
  SExprParser parser(output);
  if (parser.AtEnd()) return result;
  const SExpr status = parser.Parse();
  if (status.is_list) return result;
  if (status.atom == "sat") {
    result.status = SolverStatus::kSat;
  } else if (status.atom == "unsat") {
    result.status = SolverStatus::kUnsat;
    return result;
  } else if (status.atom == "unknown") {
    result.status = SolverStatus::kUnknown;
    return result;
  } else {
    return result;
  }
  if (parser.AtEnd()) return result;
  SExpr model = parser.Parse();
  std::vector<SExpr> entries = model.list;
  // Some solvers prefix the model with the keyword "model".
  if (!entries.empty() && !entries[0].is_list && entries[0].atom == "model") {
    entries.erase(entries.begin());
  }
  for (const SExpr& entry : entries) {
    if (!entry.is_list || entry.list.size() != 5 || entry.list[0].atom != "define-fun") continue;
    if (entry.list[3].atom != "Real") continue;
    result.model[entry.list[1].atom] = Evaluate(entry.list[4]);
  }
  return result;
}

std::optional<std::string> SolverCommandFromEnv() {
  const char* cmd = std::getenv("VPK_SOLVER_CMD");
  if (cmd == nullptr || *cmd == '\0') return std::nullopt;
  return std::string(cmd);
}

SolverResult RunSolver(const std::string& smt, const std::string& command) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path path =
      fs::temp_directory_path() / ("vpk_" + std::to_string(rd()) + "_" + std::to_string(rd()) + ".smt2");
  {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << smt;
  }
  std::string cmd = command;
  const std::size_t slot = cmd.find("{}");
  if (slot == std::string::npos) {
    cmd += " " + path.string();
  } else {
    cmd.replace(slot, 2, path.string());
  }
  std::string output;
  {
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) {
      fs::remove(path);
      throw std::runtime_error("cannot run solver command: " + cmd);
    }
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe.get())) > 0) output.append(buf, n);
  }
  fs::remove(path);
  return ParseSolverOutput(output);
}

std::vector<std::vector<Rational>> ModelTrace(const SolverResult& result, int dim, int t_max) {
  std::vector<std::vector<Rational>> trace(t_max + 1, std::vector<Rational>(dim, 0));
  for (int t = 0; t <= t_max; ++t) {
    for (int i = 0; i < dim; ++i) {
      auto it = result.model.find(Var(t, i));
      if (it != result.model.end()) trace[t][i] = it->second;
    }
  }
  return trace;
}

}  // namespace vpk
