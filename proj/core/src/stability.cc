#include "vpk/stability.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "vpk/interval.h"
#include "vpk/lqr.h"
#include "vpk/types.h"

namespace vpk {

Eigen::MatrixXd LyapunovCandidate(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw std::invalid_argument("Lyapunov candidate needs a nonempty square matrix");
  }
  if (!IsHurwitz(A)) throw std::invalid_argument("closed-loop matrix is not Hurwitz");
  const int n = static_cast<int>(A.rows());
  return SolveContinuousLyapunov(A, Eigen::MatrixXd::Identity(n, n));
}

bool IsPositiveDefinite(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0) return false;
  if (!P.isApprox(P.transpose(), 1e-9)) return false;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(P);
  if (ldlt.info() != Eigen::Success) return false;
  return (ldlt.vectorD().array() > 0.0).all();
}

Polynomial QuadraticForm(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  Polynomial v(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Polynomial::Exponents e(n, 0);
      ++e[i];
      ++e[j];
      v.AddTerm(e, P(i, j));
    }
  }
  return v;
}

Polynomial VdotPolynomial(const Eigen::MatrixXd& P, const PolynomialMap& f) {
  const int n = static_cast<int>(P.rows());
  if (f.dim_in != n || f.dim_out() != n) {
    throw std::invalid_argument("vector field dimension does not match P");
  }
  Polynomial out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (P(i, j) == 0.0) continue;
      out += Polynomial::Variable(n, i) * f.outputs[j] * (2.0 * P(i, j));
    }
  }
  return out;
}

std::string CertifyStatusName(CertifyStatus status) {
  switch (status) {
    case CertifyStatus::kCertified:
      return "certified";
    case CertifyStatus::kRefuted:
      return "refuted";
    case CertifyStatus::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

Eigen::VectorXd EllipsoidExtent(const Eigen::MatrixXd& P, double rho) {
  const Eigen::MatrixXd inv = P.inverse();
  return (rho * inv.diagonal().array()).sqrt();
}

bool SublevelContainsCube(const Eigen::MatrixXd& P, double rho, double r) {
  // A convex function attains its maximum over the cube at a vertex.
  const int n = static_cast<int>(P.rows());
  Eigen::VectorXd v(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? r : -r;
    if (v.dot(P * v) > rho) return false;
  }
  return true;
}

namespace {

// Decrease condition p(s) = Vdot(s) + c |s|^2 <= 0.
Polynomial DecreaseGap(const Eigen::MatrixXd& P, const PolynomialMap& f, double margin_c) {
  const int n = static_cast<int>(P.rows());
  return VdotPolynomial(P, f) + QuadraticForm(Eigen::MatrixXd::Identity(n, n)) * margin_c;
}

// Largest r such that p <= 0 on |s|_inf <= r, from
//   p(s) <= -lambda |s|_2^2 + sum_d C_d |s|_inf^(d-2) |s|_2^2,
// where lambda bounds the quadratic part and C_d sums |coefficients| of
// degree d. Returns 0 when the low-order part does not allow it.
double ConeRadius(const Polynomial& p) {
  const int n = p.num_vars();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> c_by_degree;
  for (const auto& [e, c] : p.terms()) {
    int d = 0;
    for (int k : e) d += k;
    if (d < 2) return 0.0;
    if (d == 2) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < e[i]; ++k) idx.push_back(i);
      }
      if (idx[0] == idx[1]) {
        Q(idx[0], idx[0]) += c;
      } else {
        Q(idx[0], idx[1]) += c / 2;
        Q(idx[1], idx[0]) += c / 2;
      }
      continue;
    }
    if (static_cast<int>(c_by_degree.size()) <= d) c_by_degree.resize(d + 1, 0.0);
    c_by_degree[d] += std::abs(c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-Q);
  // Slack for the floating-point eigenvalue.
  const double lambda = eig.eigenvalues().minCoeff() - 1e-9 * (1.0 + Q.cwiseAbs().maxCoeff());
  if (!(lambda > 0.0)) return 0.0;
  auto excess = [&](double r) {
    double sum = 0.0;
    for (std::size_t d = 3; d < c_by_degree.size(); ++d) sum += c_by_degree[d] * std::pow(r, d - 2);
    return sum * (1.0 + 1e-9);
  };
  if (excess(1e300) < lambda) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  while (excess(hi) < lambda) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < lambda ? lo : hi) = mid;
  }
  return lo;
}

// Lower bound of |s|_2^2 and upper bound of |s|_inf over a box.
double MinSquaredNorm(const Box& box) {
  double sum = 0.0;
  for (const Interval& x : box) {
    const double d = x.Contains(0.0) ? 0.0 : std::min(std::abs(x.lo), std::abs(x.hi));
    sum += d * d;
  }
  return sum * (1.0 - 1e-12);
}

double MaxSquaredNorm(const Box& box) {
  double sum = 0.0;
  for (const Interval& x : box) {
    const double d = std::max(std::abs(x.lo), std::abs(x.hi));
    sum += d * d;
  }
  return sum * (1.0 + 1e-12);
}

double MaxAbs(const Box& box) {
  double m = 0.0;
  for (const Interval& x : box) m = std::max({m, std::abs(x.lo), std::abs(x.hi)});
  return m;
}

}  // namespace

CertifyResult CertifyRegion(const Eigen::MatrixXd& P, const PolynomialMap& f, double rho,
                            const CertifyOptions& options) {
  if (!(rho > 0.0) || !(options.delta > 0.0) || !(options.margin_c > 0.0)) {
    throw std::invalid_argument("rho, delta and margin_c must be positive");
  }
  if (!IsPositiveDefinite(P)) throw std::invalid_argument("P is not positive definite");
  const int n = static_cast<int>(P.rows());
  const Polynomial gap = DecreaseGap(P, f, options.margin_c);
  const IntervalPolynomial gap_iv(gap);
  const IntervalPolynomial v_iv(QuadraticForm(P));
  const double p_min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues().minCoeff() * (1.0 - 1e-9);

  CertifyResult result;
  result.stats.cone_radius = ConeRadius(gap);
  const Eigen::VectorXd extent = EllipsoidExtent(P, rho) * (1.0 + 1e-9);
  const double delta2 = options.delta * options.delta;

  struct Item {
    Box box;
    int depth;
  };
  std::vector<Item> stack;
  Box root(n);
  for (int i = 0; i < n; ++i) root[i] = Interval(-extent[i], extent[i]);
  stack.push_back({root, 0});
  Eigen::VectorXd mid(n);
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    if (++result.stats.boxes > options.budget) {
      result.status = CertifyStatus::kBudgetExhausted;
      return result;
    }
    result.stats.max_depth = std::max(result.stats.max_depth, item.depth);
    const Box& box = item.box;
    if (MaxAbs(box) <= result.stats.cone_radius) continue;
    if (MaxSquaredNorm(box) < delta2) continue;
    const double v_lo = std::max(v_iv.Evaluate(box).lo, p_min_eig * MinSquaredNorm(box));
    if (v_lo > rho) continue;
    if (gap_iv.Evaluate(box).hi <= 0.0) continue;
    for (int i = 0; i < n; ++i) mid[i] = box[i].mid();
    if (mid.dot(P * mid) <= rho && mid.squaredNorm() >= delta2 && gap.Evaluate(mid) > 0.0) {
      result.status = CertifyStatus::kRefuted;
      result.violation = mid;
      return result;
    }
    int widest = 0;
    for (int i = 1; i < n; ++i) {
      if (box[i].width() > box[widest].width()) widest = i;
    }
    Box left = box, right = box;
    left[widest].hi = mid[widest];
    right[widest].lo = mid[widest];
    stack.push_back({std::move(right), item.depth + 1});
    stack.push_back({std::move(left), item.depth + 1});
  }
  result.status = CertifyStatus::kCertified;
  return result;
}

bool StabilityCertificate::InRegion(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  return V(s) <= rho && (leaf_box.dim() == 0 || leaf_box.Contains(s));
}

nlohmann::json StabilityCertificate::ToJson() const {
  const int n = static_cast<int>(P.rows());
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = P(i, j);
    rows.push_back(row);
  }
  auto bounds = [](const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) {
      if (std::isfinite(v[i])) {
        out.push_back(v[i]);
      } else {
        out.push_back(nullptr);
      }
    }
    return out;
  };
  return {{"P", rows},
          {"rho", rho},
          {"delta", delta},
          {"margin", margin_c},
          {"leaf_node", leaf_node},
          {"leaf_box", {{"lower", bounds(leaf_box.lower)}, {"upper", bounds(leaf_box.upper)}}},
          {"dynamics", dynamics},
          {"stats",
           {{"boxes", stats.boxes},
            {"max_depth", stats.max_depth},
            {"cone_radius", std::isfinite(stats.cone_radius) ? nlohmann::json(stats.cone_radius)
                                                              : nlohmann::json(nullptr)}}}};
}

StabilityCertificate StabilityCertificate::FromJson(const nlohmann::json& j) {
  StabilityCertificate c;
  const auto& rows = j.at("P");
  const int n = static_cast<int>(rows.size());
  c.P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw std::invalid_argument("certificate P is not square");
    for (int k = 0; k < n; ++k) c.P(i, k) = rows[i][k].get<double>();
  }
  c.rho = j.at("rho").get<double>();
  c.delta = j.at("delta").get<double>();
  c.margin_c = j.at("margin").get<double>();
  c.leaf_node = j.value("leaf_node", -1);
  c.dynamics = j.value("dynamics", "");
  auto bounds = [](const nlohmann::json& a, double missing) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].is_null() ? missing : a[i].get<double>();
    return v;
  };
  const double inf = std::numeric_limits<double>::infinity();
  c.leaf_box.lower = bounds(j.at("leaf_box").at("lower"), -inf);
  c.leaf_box.upper = bounds(j.at("leaf_box").at("upper"), inf);
  const auto& stats = j.at("stats");
  c.stats.boxes = stats.at("boxes").get<std::int64_t>();
  c.stats.max_depth = stats.at("max_depth").get<int>();
  c.stats.cone_radius = stats.at("cone_radius").is_null() ? inf : stats.at("cone_radius").get<double>();
  if (!(c.rho > 0.0) || !IsPositiveDefinite(c.P)) {
    throw std::invalid_argument("certificate needs rho > 0 and a positive definite P");
  }
  return c;
}

double SampleRhoUpper(const Eigen::MatrixXd& P, const PolynomialMap& f,
                      const MaxRhoOptions& options) {
  const int n = static_cast<int>(P.rows());
  const Polynomial gap = DecreaseGap(P, f, options.certify.margin_c);
  const double delta2 = options.certify.delta * options.certify.delta;
  Rng rng(options.seed);
  std::normal_distribution<double> normal;
  double best = options.scan_max;
  Eigen::VectorXd u(n), s(n);
  // In one dimension both directions are enumerated.
  const int count = n == 1 ? 2 : options.directions;
  for (int k = 0; k < count; ++k) {
    if (n == 1) {
      u[0] = k == 0 ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < n; ++i) u[i] = normal(rng);
    }
    u /= std::sqrt(u.dot(P * u));
    for (double level = options.rho_min; level < best; level *= options.scan_ratio) {
      s = u * std::sqrt(level);
      if (s.squaredNorm() >= delta2 && gap.Evaluate(s) > 0.0) {
        best = level;
        break;
      }
    }
  }
  return best;
}

StabilityResult MaxRho(const Eigen::MatrixXd& P, const PolynomialMap& f,
                       const MaxRhoOptions& options) {
  if (!(options.rho_min > 0.0)) throw std::invalid_argument("rho_min must be positive");
  StabilityResult out;
  out.rho_upper = std::min(SampleRhoUpper(P, f, options), options.rho_cap);
  auto certify = [&](double rho, std::int64_t budget) {
    CertifyOptions co = options.certify;
    co.budget = std::min(co.budget, budget);
    CertifyResult r = CertifyRegion(P, f, rho, co);
    out.total_boxes += r.stats.boxes;
    return r;
  };
  CertifyResult best = certify(options.rho_min, options.certify.budget);
  if (!best.certified()) {
    out.refutation = best.violation;
    out.message = "rho_min not certified: " + CertifyStatusName(best.status);
    return out;
  }
  double lo = options.rho_min;
  double hi = out.rho_upper;
  if (hi <= lo) {
    out.message = "upper bound below rho_min";
  } else {
    CertifyResult top = certify(hi, options.step_budget);
    if (top.certified()) {
      lo = hi;
      best = top;
    } else {
      // The bracket can span many orders of magnitude, so split it
      // geometrically.
      for (int i = 0; i < options.bisections && hi - lo > options.rel_tol * lo; ++i) {
        const double mid = std::sqrt(lo * hi);
        CertifyResult r = certify(mid, options.step_budget);
        if (r.certified()) {
          lo = mid;
          best = r;
        } else {
          hi = mid;
        }
      }
    }
  }
  StabilityCertificate cert;
  cert.P = P;
  cert.rho = lo;
  cert.delta = options.certify.delta;
  cert.margin_c = options.certify.margin_c;
  cert.leaf_box = LeafBox::Unbounded(static_cast<int>(P.rows()));
  cert.stats = best.stats;
  cert.dynamics = "polynomial";
  out.certificate = cert;
  return out;
}

PolynomialMap CloseLoop(const PolynomialMap& f_env, const Eigen::VectorXd& coef) {
  const int n = static_cast<int>(coef.size());
  if (f_env.dim_in != n + 1 || f_env.dim_out() != n) {
    throw std::invalid_argument("environment field must map (s, a) to ds with dim(s) = " +
                                std::to_string(n));
  }
  std::vector<Polynomial> replacement;
  Polynomial action(n);
  for (int i = 0; i < n; ++i) {
    replacement.push_back(Polynomial::Variable(n, i));
    action += Polynomial::Variable(n, i) * coef[i];
  }
  replacement.push_back(action);
  return f_env.Substitute(replacement);
}

StabilityResult TreeRoa(const DecisionTree& tree, const PolynomialMap& f_env,
                        const MaxRhoOptions& options) {
  if (tree.leaf_kind() != LeafKind::kLinear) {
    throw std::invalid_argument("region of attraction needs a linear-leaf tree");
  }
  const int n = tree.dim();
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  const LeafRegion* leaf = nullptr;
  const std::vector<LeafRegion> regions = tree.LeafRegions();
  for (const LeafRegion& r : regions) {
    if (r.box.Contains(origin)) leaf = &r;
  }
  if (leaf == nullptr) throw std::logic_error("no leaf contains the origin");
  for (int i = 0; i < n; ++i) {
    if (leaf->box.lower[i] == 0.0 || leaf->box.upper[i] == 0.0) {
      throw std::invalid_argument("origin lies on a split boundary of feature " + std::to_string(i));
    }
  }
  if (leaf->intercept != 0.0) {
    throw std::invalid_argument("leaf at the origin has a nonzero intercept; the origin is not an equilibrium");
  }
  const PolynomialMap f = CloseLoop(f_env, leaf->coef);
  const Eigen::MatrixXd A = f.LinearPart();
  const Eigen::MatrixXd P = LyapunovCandidate(A);

  // Keep the closed ellipsoid inside the half-open leaf box.
  MaxRhoOptions opts = options;
  const Eigen::VectorXd inv_diag = P.inverse().diagonal();
  for (int i = 0; i < n; ++i) {
    for (double b : {leaf->box.lower[i], leaf->box.upper[i]}) {
      if (std::isfinite(b)) opts.rho_cap = std::min(opts.rho_cap, b * b / inv_diag[i] * (1.0 - 1e-9));
    }
  }
  StabilityResult out = MaxRho(P, f, opts);
  if (out.certificate) {
    out.certificate->leaf_box = leaf->box;
    out.certificate->leaf_node = leaf->node;
    out.certificate->dynamics = "closed loop of leaf " + std::to_string(leaf->node);
  }
  return out;
}

EnumerativeResult EnumerativeCheck(const Eigen::MatrixXd& P, const PolynomialMap& f, double rho,
                                   double grid_step, double delta, std::int64_t max_points) {
  if (!(rho > 0.0) || !(grid_step > 0.0)) throw std::invalid_argument("rho and grid_step must be positive");
  const int n = static_cast<int>(P.rows());
  const Polynomial vdot = VdotPolynomial(P, f);
  const Eigen::VectorXd extent = EllipsoidExtent(P, rho);
  std::vector<std::int64_t> half(n);
  EnumerativeResult out;
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    half[i] = static_cast<std::int64_t>(std::floor(extent[i] / grid_step));
    total *= static_cast<double>(2 * half[i] + 1);
  }
  out.grid_points = total > 9e18 ? std::numeric_limits<std::int64_t>::max()
                                 : static_cast<std::int64_t>(total);
  std::vector<std::int64_t> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = -half[i];
  Eigen::VectorXd s(n);
  while (true) {
    if (out.evaluated >= max_points) {
      out.truncated = true;
      break;
    }
    ++out.evaluated;
    for (int i = 0; i < n; ++i) s[i] = static_cast<double>(idx[i]) * grid_step;
    if (s.dot(P * s) <= rho && s.norm() >= delta && vdot.Evaluate(s) >= 0.0) {
      out.violations.push_back(s);
    }
    int i = 0;
    while (i < n && idx[i] == half[i]) {
      idx[i] = -half[i];
      ++i;
    }
    if (i == n) break;
    ++idx[i];
  }
  return out;
}

}  // namespace vpk
