#include "vpk/sos.h"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "vpk/stability.h"

namespace vpk {

namespace {

std::string Num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string SymName(const char* prefix, int i, int j) {
  if (i > j) std::swap(i, j);
  return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

void AddTo(SosConstraint& c, const Polynomial::Exponents& e, const std::string& unknown, double k) {
  if (k == 0.0) return;
  LinearExpr& expr = c.terms[e];
  if (unknown.empty()) {
    expr.constant += k;
  } else {
    expr.coeffs[unknown] += k;
  }
}

void AddPolynomial(SosConstraint& c, const Polynomial& p, const std::string& unknown, double k) {
  for (const auto& [e, coef] : p.terms()) AddTo(c, e, unknown, k * coef);
}

std::vector<std::string> VariableNames(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

// x_i x_j as a polynomial.
Polynomial Product(int n, int i, int j) {
  return Polynomial::Variable(n, i) * Polynomial::Variable(n, j);
}

}  // namespace

std::string SosProgram::ToText() const {
  std::ostringstream out;
  out << "vpk-sos 1\n";
  out << "mode " << mode << "\n";
  out << "variables";
  for (const auto& v : variables) out << " " << v;
  out << "\nunknowns";
  for (const auto& u : unknowns) out << " " << u;
  out << "\n";
  for (const auto& [name, entries] : psd) {
    out << "psd " << name;
    for (const auto& e : entries) out << " " << e;
    out << "\n";
  }
  if (!fixed_p.empty()) {
    out << "fixed P";
    for (double x : fixed_p) out << " " << Num(x);
    out << "\n";
  }
  out << "objective " << objective << "\n";
  for (const SosConstraint& c : constraints) {
    out << "constraint " << c.kind << "\n";
    for (const auto& [e, expr] : c.terms) {
      out << "term";
      for (int k : e) out << " " << k;
      out << " : " << Num(expr.constant);
      for (const auto& [u, k] : expr.coeffs) out << " " << u << " " << Num(k);
      out << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

SosProgram SosProgram::FromText(const std::string& text) {
  SosProgram p;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  SosConstraint* open = nullptr;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("sos document line " + std::to_string(line_no) + ": " + why);
  };
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!header) {
      int version = 0;
      if (key != "vpk-sos" || !(ls >> version) || version != 1) fail("expected 'vpk-sos 1'");
      header = true;
      continue;
    }
    if (open != nullptr) {
      if (key == "end") {
        open = nullptr;
        continue;
      }
      if (key != "term") fail("expected 'term' or 'end'");
      Polynomial::Exponents e;
      std::string tok;
      while (ls >> tok && tok != ":") {
        try {
          e.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          fail("bad exponent '" + tok + "'");
        }
      }
      if (tok != ":" || e.size() != p.variables.size()) fail("term needs one exponent per variable then ':'");
      LinearExpr expr;
      if (!(ls >> expr.constant)) fail("term needs a constant");
      std::string u;
      double k = 0.0;
      while (ls >> u) {
        if (!(ls >> k)) fail("unknown '" + u + "' has no coefficient");
        expr.coeffs[u] = k;
      }
      open->terms[e] = expr;
      continue;
    }
    std::string rest;
    std::vector<std::string> words;
    while (ls >> rest) words.push_back(rest);
    if (key == "mode") {
      if (words.size() != 1) fail("mode takes one word");
      p.mode = words[0];
    } else if (key == "variables") {
      p.variables = words;
    } else if (key == "unknowns") {
      p.unknowns = words;
    } else if (key == "psd") {
      if (words.empty()) fail("psd needs a name");
      p.psd.emplace_back(words[0], std::vector<std::string>(words.begin() + 1, words.end()));
    } else if (key == "fixed") {
      if (words.empty() || words[0] != "P") fail("only 'fixed P' is supported");
      for (std::size_t i = 1; i < words.size(); ++i) p.fixed_p.push_back(std::stod(words[i]));
    } else if (key == "objective") {
      std::string obj;
      for (const auto& w : words) obj += (obj.empty() ? "" : " ") + w;
      p.objective = obj;
    } else if (key == "constraint") {
      if (words.size() != 1 || (words[0] != "nonneg" && words[0] != "nonpos")) {
        fail("constraint kind must be nonneg or nonpos");
      }
      p.constraints.push_back({words[0], {}});
      open = &p.constraints.back();
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }
  if (!header) throw std::invalid_argument("sos document is empty");
  if (open != nullptr) throw std::invalid_argument("sos document ends inside a constraint");
  return p;
}

SosProgram EmitLyapunovSos(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("A must be square");
  const int n = static_cast<int>(A.rows());
  SosProgram prog;
  prog.mode = "candidate";
  prog.variables = VariableNames(n);
  std::vector<std::string> entries;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) entries.push_back(SymName("p", i, j));
  }
  prog.unknowns = entries;
  prog.psd.emplace_back("P", entries);
  const Polynomial norm2 = QuadraticForm(Eigen::MatrixXd::Identity(n, n));

  SosConstraint pos{"nonneg", {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) AddPolynomial(pos, Product(n, i, j), SymName("p", i, j), 1.0);
  }
  AddPolynomial(pos, norm2, "", -1.0);

  // s'PAs = sum_{i,j,k} P_ij A_jk x_i x_k.
  SosConstraint dec{"nonpos", {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (A(j, k) != 0.0) AddPolynomial(dec, Product(n, i, k), SymName("p", i, j), A(j, k));
      }
    }
  }
  AddPolynomial(dec, norm2, "", 1.0);
  prog.constraints = {pos, dec};
  return prog;
}

SosProgram EmitRoaSos(const Eigen::MatrixXd& P, const PolynomialMap& f) {
  const int n = static_cast<int>(P.rows());
  const Polynomial vdot = VdotPolynomial(P, f);
  SosProgram prog;
  prog.mode = "roa";
  prog.variables = VariableNames(n);
  std::vector<std::string> entries;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) entries.push_back(SymName("l", i, j));
  }
  prog.unknowns = entries;
  prog.unknowns.push_back("rho");
  prog.psd.emplace_back("Lambda", entries);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) prog.fixed_p.push_back(P(i, j));
  }
  prog.objective = "maximize rho";
  const Polynomial norm2 = QuadraticForm(Eigen::MatrixXd::Identity(n, n));
  SosConstraint c{"nonpos", {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) AddPolynomial(c, Product(n, i, j) * vdot, SymName("l", i, j), 1.0);
  }
  AddPolynomial(c, norm2, "rho", 1.0);
  AddPolynomial(c, QuadraticForm(P) * norm2, "", -1.0);
  prog.constraints = {c};
  return prog;
}

}  // namespace vpk
