#include "vpk/reachability.h"

#include <map>
#include <memory>
#include <stdexcept>

#include "vpk/simplex.h"

namespace vpk {

void SafetySpec::Validate(int dim) const {
  if (t_max < 1) throw std::invalid_argument("safety spec needs t_max >= 1");
  auto check = [dim](const Polytope& p, const char* what) {
    if (p.dim != dim) throw std::invalid_argument(std::string("safety spec ") + what + " has the wrong dimension");
    for (const LinearConstraint& c : p.constraints) {
      if (c.normal.size() != dim) throw std::invalid_argument(std::string("safety spec ") + what + " constraint has the wrong dimension");
    }
  };
  check(initial, "initial set");
  for (const Polytope& p : target) check(p, "target");
  for (const Polytope& p : unsafe) check(p, "unsafe set");
  if (mode == SpecMode::kInvariant && target.empty()) {
    throw std::invalid_argument("invariant specs need a target");
  }
}

std::string OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kSafe:
      return "safe";
    case Outcome::kCounterexample:
      return "counterexample";
    case Outcome::kBudgetExceeded:
      return "budget_exceeded";
  }
  return "unknown";
}

nlohmann::json Verdict::ToJson() const {
  nlohmann::json j = {{"outcome", OutcomeName(outcome)}, {"nodes", nodes}};
  if (outcome == Outcome::kCounterexample) {
    nlohmann::json trace_json = nlohmann::json::array();
    for (const StateVector& s : trace) {
      trace_json.push_back(std::vector<double>(s.data(), s.data() + s.size()));
    }
    j["violation_step"] = violation_step;
    j["reason"] = reason;
    j["trace"] = trace_json;
    j["piece_path"] = piece_path;
    j["initial_state_exact"] = initial_exact;
    j["witness_margin"] = witness_margin;
    if (replay_ok) j["replay_ok"] = *replay_ok;
  }
  return j;
}

PiecewiseAffineSystem ComposeClosedLoop(const PiecewiseAffineSystem& env,
                                        const DecisionTree& tree) {
  if (tree.leaf_kind() != LeafKind::kDiscrete) {
    throw std::invalid_argument("closed-loop composition needs a discrete-leaf tree");
  }
  if (tree.dim() != env.dim()) {
    throw std::invalid_argument("tree dimension " + std::to_string(tree.dim()) +
                                " does not match the system dimension " +
                                std::to_string(env.dim()));
  }
  const int d = env.dim();
  PiecewiseAffineSystem out(d);
  for (const LeafRegion& region : tree.LeafRegions()) {
    std::vector<LinearConstraint> leaf;
    for (int i = 0; i < d; ++i) {
      if (std::isfinite(region.box.upper[i])) {
        leaf.push_back(LinearConstraint::Upper(d, i, region.box.upper[i]));
      }
      if (std::isfinite(region.box.lower[i])) {
        leaf.push_back(LinearConstraint::Lower(d, i, region.box.lower[i], true));
      }
    }
    for (const AffinePiece& piece : env.pieces()) {
      if (piece.action != region.action) continue;
      AffinePiece p = piece;
      p.action = -1;
      p.guard = leaf;
      p.guard.insert(p.guard.end(), piece.guard.begin(), piece.guard.end());
      p.label = "leaf" + std::to_string(region.node) + "/" + piece.label;
      Polytope cell{d, p.guard};
      if (cell.IsEmpty()) continue;
      out.AddPiece(std::move(p));
    }
  }
  return out;
}

namespace {

struct BudgetExceeded {};

struct ExactPiece {
  RationalMatrix M;
  std::vector<Rational> c;
};

// Constraints shared by several pieces are checked once: pieces are stored in
// a trie keyed by their guard constraints in order.
struct TrieNode {
  int constraint = -1;
  std::vector<std::unique_ptr<TrieNode>> children;
  std::vector<int> pieces;
};

struct Frame {
  RationalMatrix M;
  std::vector<Rational> c;
};

class Explorer {
 public:
  Explorer(const PiecewiseAffineSystem& system, const SafetySpec& spec,
           const ReachOptions& options)
      : system_(system), spec_(spec), options_(options), dim_(system.dim()), simplex_(dim_) {
    std::map<std::tuple<std::vector<double>, double, bool>, int> ids;
    for (int p = 0; p < static_cast<int>(system.pieces().size()); ++p) {
      const AffinePiece& piece = system.pieces()[p];
      TrieNode* node = &root_;
      for (const LinearConstraint& g : piece.guard) {
        const auto key = std::make_tuple(
            std::vector<double>(g.normal.data(), g.normal.data() + g.normal.size()), g.offset,
            g.strict);
        auto [it, inserted] = ids.try_emplace(key, static_cast<int>(constraints_.size()));
        if (inserted) constraints_.push_back(RationalConstraint::From(g));
        const int id = it->second;
        TrieNode* next = nullptr;
        for (auto& child : node->children) {
          if (child->constraint == id) next = child.get();
        }
        if (!next) {
          node->children.push_back(std::make_unique<TrieNode>());
          next = node->children.back().get();
          next->constraint = id;
        }
        node = next;
      }
      node->pieces.push_back(p);
      pieces_.push_back({ToRationalMatrix(piece.M), ToRational(piece.c)});
    }
  }

  Verdict Run() {
    Verdict v;
    try {
      for (const LinearConstraint& c : spec_.initial.constraints) {
        if (!Assert(RationalConstraint::From(c))) {
          v.outcome = Outcome::kSafe;
          v.nodes = nodes_;
          return v;
        }
      }
      frames_.push_back({Identity(dim_), std::vector<Rational>(dim_, 0)});
      Explore(0);
    } catch (const BudgetExceeded&) {
      v.outcome = Outcome::kBudgetExceeded;
      v.nodes = nodes_;
      return v;
    }
    if (found_) {
      found_->nodes = nodes_;
      return *found_;
    }
    v.outcome = Outcome::kSafe;
    v.nodes = nodes_;
    return v;
  }

 private:
  // Maps a state-space constraint at the current depth to initial-state space.
  RationalConstraint Pull(const RationalConstraint& g) const {
    const Frame& f = frames_.back();
    return {LeftMultiply(g.a, f.M), g.b - Dot(g.a, f.c), g.strict};
  }

  // Adds a constraint (already in initial-state space) and checks
  // feasibility. The caller pops on both outcomes.
  bool Assert(const RationalConstraint& r) {
    simplex_.Push();
    path_.push_back(r);
    bool all_zero = true;
    for (const Rational& a : r.a) all_zero = all_zero && sgn(a) == 0;
    if (all_zero) return r.strict ? sgn(r.b) > 0 : sgn(r.b) >= 0;
    if (++nodes_ > options_.node_budget) throw BudgetExceeded{};
    simplex_.AddConstraint(r.a, r.b, r.strict);
    return simplex_.Check();
  }

  void Retract() {
    simplex_.Pop();
    path_.pop_back();
  }

  // Explores the set reached at depth t (constraints asserted so far).
  // Returns true once a counterexample is recorded.
  bool Explore(int t) {
    for (const Polytope& u : spec_.unsafe) {
      if (CheckViolation(u.constraints, t, "unsafe")) return true;
    }
    if (spec_.mode == SpecMode::kInvariant && t >= 1) {
      return ExploreOutsideTarget(t, 0);
    }
    if (t == spec_.t_max) return false;
    return Branch(root_, t);
  }

  // Splits the remaining set over the complement of target[k..] into
  // disjoint cells: not c_1, then c_1 and not c_2, and so on.
  bool ExploreOutsideTarget(int t, std::size_t k) {
    if (k == spec_.target.size()) {
      if (t == spec_.t_max) return RecordCounterexample(t, "target not reached");
      return Branch(root_, t);
    }
    const std::vector<LinearConstraint>& cs = spec_.target[k].constraints;
    std::size_t kept = 0;
    bool stop = false;
    for (std::size_t j = 0; j < cs.size() && !stop; ++j) {
      const bool feasible = Assert(Pull(RationalConstraint::From(cs[j].Negated())));
      stop = feasible && ExploreOutsideTarget(t, k + 1);
      Retract();
      if (stop || j + 1 == cs.size()) break;
      ++kept;
      if (!Assert(Pull(RationalConstraint::From(cs[j])))) break;
    }
    for (std::size_t i = 0; i < kept; ++i) Retract();
    return stop;
  }

  bool CheckViolation(const std::vector<LinearConstraint>& region, int t, const char* reason) {
    std::size_t asserted = 0;
    bool feasible = true;
    for (const LinearConstraint& c : region) {
      ++asserted;
      if (!Assert(Pull(RationalConstraint::From(c)))) {
        feasible = false;
        break;
      }
    }
    const bool recorded = feasible && RecordCounterexample(t, reason);
    for (std::size_t i = 0; i < asserted; ++i) Retract();
    return recorded;
  }

  bool Branch(const TrieNode& node, int t) {
    for (int p : node.pieces) {
      const ExactPiece& piece = pieces_[p];
      const Frame& f = frames_.back();
      Frame next{Multiply(piece.M, f.M), Multiply(piece.M, f.c)};
      for (int i = 0; i < dim_; ++i) next.c[i] += piece.c[i];
      frames_.push_back(std::move(next));
      piece_path_.push_back(p);
      const bool stop = Explore(t + 1);
      piece_path_.pop_back();
      frames_.pop_back();
      if (stop) return true;
    }
    for (const auto& child : node.children) {
      const bool feasible = Assert(Pull(constraints_[child->constraint]));
      const bool stop = feasible && Branch(*child, t);
      Retract();
      if (stop) return true;
    }
    return false;
  }

  bool RecordCounterexample(int t, const char* reason) {
    Verdict v;
    v.outcome = Outcome::kCounterexample;
    v.violation_step = t;
    v.reason = reason;
    v.piece_path = piece_path_;
    std::vector<Rational> s0 = simplex_.Model();
    // Prefer a witness that satisfies every path constraint with a margin so
    // that rounding it to doubles keeps it on the same piece path.
    for (double eta : {1e-2, 1e-4, 1e-6, 1e-8}) {
      Simplex tight(dim_);
      const Rational margin = ToRational(eta);
      for (const RationalConstraint& r : path_) {
        Rational norm = 1;
        for (const Rational& a : r.a) norm += abs(a);
        tight.AddConstraint(r.a, r.b - margin * norm, false);
      }
      if (tight.Check()) {
        s0 = tight.Model();
        v.witness_margin = eta;
        break;
      }
    }
    for (const Rational& q : s0) v.initial_exact.push_back(q.get_str());
    // frames_[k] maps the initial state to s_k along the recorded path.
    for (int k = 0; k <= t; ++k) {
      std::vector<Rational> s = Multiply(frames_[k].M, s0);
      for (int i = 0; i < dim_; ++i) s[i] += frames_[k].c[i];
      v.trace.push_back(ToDouble(s));
    }
    found_ = std::move(v);
    return true;
  }

  const PiecewiseAffineSystem& system_;
  const SafetySpec& spec_;
  const ReachOptions& options_;
  int dim_;
  Simplex simplex_;
  std::vector<RationalConstraint> constraints_;
  std::vector<ExactPiece> pieces_;
  TrieNode root_;
  std::vector<Frame> frames_;
  std::vector<RationalConstraint> path_;
  std::vector<int> piece_path_;
  std::int64_t nodes_ = 0;
  std::optional<Verdict> found_;
};

}  // namespace

Verdict ReachCheck(const PiecewiseAffineSystem& system, const SafetySpec& spec,
                   const ReachOptions& options) {
  spec.Validate(system.dim());
  Explorer explorer(system, spec, options);
  return explorer.Run();
}

namespace {

bool InUnion(const std::vector<Polytope>& sets, const StateVector& s) {
  for (const Polytope& p : sets) {
    if (p.Contains(s)) return true;
  }
  return false;
}

}  // namespace

bool ReplayCounterexample(const StateVector& s0, const StepFunction& step,
                          const SafetySpec& spec) {
  StateVector s = s0;
  if (InUnion(spec.unsafe, s)) return true;
  for (int t = 1; t <= spec.t_max; ++t) {
    s = step(s);
    if (InUnion(spec.unsafe, s)) return true;
    if (spec.mode == SpecMode::kInvariant && InUnion(spec.target, s)) return false;
  }
  return spec.mode == SpecMode::kInvariant;
}

bool ReplayCounterexample(const std::vector<StateVector>& trace, const Environment& env,
                          const DecisionTree& tree, const SafetySpec& spec) {
  if (trace.empty()) throw std::invalid_argument("cannot replay an empty trace");
  if (!spec.initial.Contains(trace.front())) return false;
  std::unique_ptr<Environment> sim = env.Clone();
  const StepFunction step = [&](const StateVector& s) {
    sim->SetState(s);
    return sim->Step(tree.Predict(s)).state;
  };
  return ReplayCounterexample(trace.front(), step, spec);
}

}  // namespace vpk
