#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vpk/reachability.h"
#include "vpk/rational.h"

namespace vpk {

/// QF_LRA encoding of the negated safety property for `system` over
/// t_max steps. Variable s_t_i is coordinate i at step t; Boolean tr_t holds
/// when some piece maps s_t to s_{t+1}. A model is a counterexample run.
std::string EncodeSmtLib(const PiecewiseAffineSystem& system, const SafetySpec& spec);

/// SMT-LIB literal for an exact rational, e.g. (- (/ 3 4)).
std::string SmtRational(const Rational& q);

enum class SolverStatus { kSat, kUnsat, kUnknown, kError };

struct SolverResult {
  SolverStatus status = SolverStatus::kError;
  /// Real-valued constants from get-model.
  std::map<std::string, Rational> model;
  std::string output;
};

/// Parses solver output: the first line is the status, the rest an optional
/// get-model response with define-fun entries.
SolverResult ParseSolverOutput(const std::string& output);

/// Value of VPK_SOLVER_CMD, if set and non-empty.
std::optional<std::string> SolverCommandFromEnv();

/// Writes `smt` to a temporary file and runs `command` on it. "{}" in the
/// command is replaced by the file path; otherwise the path is appended.
SolverResult RunSolver(const std::string& smt, const std::string& command);

/// s_0 .. s_{t_max} from a model; missing constants read as 0.
std::vector<std::vector<Rational>> ModelTrace(const SolverResult& result, int dim, int t_max);

}  // namespace vpk
