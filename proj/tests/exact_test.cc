#include <cmath>

#include <gtest/gtest.h>

#include "vpk/piecewise_affine.h"
#include "vpk/polynomial.h"
#include "vpk/polytope.h"
#include "vpk/rational.h"
#include "vpk/simplex.h"
#include "vpk/types.h"

namespace vpk {
namespace {

struct Row {
  std::vector<Rational> a;
  Rational b;
  bool strict;
};

// Fourier-Motzkin elimination: exact and complete for small systems.
bool FmFeasible(std::vector<Row> rows, int n) {
  for (int v = n - 1; v >= 0; --v) {
    std::vector<Row> pos, neg, next;
    for (Row& r : rows) {
      if (r.a[v] > 0) {
        pos.push_back(r);
      } else if (r.a[v] < 0) {
        neg.push_back(r);
      } else {
        next.push_back(r);
      }
    }
    for (const Row& p : pos) {
      for (const Row& q : neg) {
        Row c{std::vector<Rational>(n), 0, p.strict || q.strict};
        const Rational sp = -q.a[v], sq = p.a[v];
        for (int i = 0; i < n; ++i) c.a[i] = sp * p.a[i] + sq * q.a[i];
        c.b = sp * p.b + sq * q.b;
        next.push_back(c);
      }
    }
    rows = std::move(next);
  }
  for (const Row& r : rows) {
    if (r.strict ? !(0 < r.b) : !(0 <= r.b)) return false;
  }
  return true;
}

TEST(RationalTest, ExactDoubleConversion) {
  EXPECT_EQ(ToRational(0.1), Rational(3602879701896397, 36028797018963968));
  EXPECT_EQ(ToRational(-2.5), Rational(-5, 2));
  EXPECT_EQ(ToDouble(ToRational(1e-300)), 1e-300);
  EXPECT_THROW(ToRational(NAN), std::invalid_argument);
  EXPECT_THROW(ToRational(INFINITY), std::invalid_argument);
}

TEST(RationalTest, DeltaOrdering) {
  const DeltaRational a(1, -1), b(1), c(Rational(1, 2), 5);
  EXPECT_TRUE(a < b);
  EXPECT_TRUE(c < a);
  EXPECT_TRUE(b <= b);
  EXPECT_EQ(a + c, DeltaRational(Rational(3, 2), 4));
}

TEST(RationalTest, MatrixHelpers) {
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  const RationalMatrix r = ToRationalMatrix(m);
  EXPECT_EQ(Multiply(r, Identity(2)), r);
  const std::vector<Rational> x = {1, -1};
  EXPECT_EQ(Multiply(r, x), (std::vector<Rational>{-1, -1}));
  EXPECT_EQ(LeftMultiply(x, r), (std::vector<Rational>{-2, -2}));
  EXPECT_EQ(Dot(x, x), 2);
}

TEST(SimplexTest, StrictBoundsAreExact) {
  Simplex s(1);
  s.AddConstraint({1}, 1, true);    // x < 1
  s.AddConstraint({-1}, -1, false);  // x >= 1
  EXPECT_FALSE(s.Check());
  Simplex t(1);
  t.AddConstraint({1}, 1, false);
  t.AddConstraint({-1}, -1, false);
  ASSERT_TRUE(t.Check());
  EXPECT_EQ(t.Model()[0], 1);
}

TEST(SimplexTest, PushPopRestoresFeasibility) {
  Simplex s(2);
  s.AddConstraint({1, 1}, 2, false);
  s.Push();
  s.AddConstraint({-1, 0}, -3, false);
  s.AddConstraint({0, -1}, 0, false);
  EXPECT_FALSE(s.Check());
  s.Pop();
  EXPECT_EQ(s.num_constraints(), 1u);
  EXPECT_TRUE(s.Check());
}

TEST(SimplexTest, AgreesWithFourierMotzkin) {
  Rng rng(8);
  int feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + trial % 2;
    const int m = 3 + static_cast<int>(rng() % 5);
    std::vector<Row> rows;
    Simplex s(n);
    for (int k = 0; k < m; ++k) {
      Row r{std::vector<Rational>(n), static_cast<long>(rng() % 9) - 3, rng() % 2 == 0};
      for (int i = 0; i < n; ++i) r.a[i] = static_cast<long>(rng() % 7) - 3;
      rows.push_back(r);
      s.AddConstraint(r.a, r.b, r.strict);
    }
    const bool expected = FmFeasible(rows, n);
    ASSERT_EQ(s.Check(), expected) << "trial " << trial;
    if (expected) {
      ++feasible;
      const std::vector<Rational> x = s.Model();
      for (const Row& r : rows) {
        const Rational lhs = Dot(r.a, x);
        EXPECT_TRUE(r.strict ? lhs < r.b : lhs <= r.b) << "trial " << trial;
      }
    }
  }
  // Both outcomes are exercised.
  EXPECT_GT(feasible, 50);
  EXPECT_LT(feasible, 350);
}

TEST(SimplexTest, ModelsStayValidAcrossPushPop) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    Simplex s(2);
    std::vector<Row> rows;
    std::vector<std::size_t> marks;
    for (int op = 0; op < 30; ++op) {
      if (rng() % 3 == 0 && !marks.empty()) {
        s.Pop();
        rows.resize(marks.back());
        marks.pop_back();
      } else {
        s.Push();
        marks.push_back(rows.size());
        Row r{{static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3},
              static_cast<long>(rng() % 9) - 2, rng() % 2 == 0};
        s.AddConstraint(r.a, r.b, r.strict);
        rows.push_back(r);
      }
      const bool feasible = s.Check();
      ASSERT_EQ(feasible, FmFeasible(rows, 2)) << "trial " << trial << " op " << op;
      if (!feasible) continue;
      const std::vector<Rational> x = s.Model();
      for (const Row& r : rows) {
        const Rational lhs = Dot(r.a, x);
        ASSERT_TRUE(r.strict ? lhs < r.b : lhs <= r.b) << "trial " << trial << " op " << op;
      }
    }
  }
}

TEST(PolytopeTest, EmptinessAndContainment) {
  const Polytope box = Polytope::Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  EXPECT_FALSE(box.IsEmpty());
  EXPECT_TRUE(box.Contains(Eigen::Vector2d(1, 0)));
  Polytope open = box;
  open.constraints.push_back(LinearConstraint::Lower(2, 0, 1.0, true));  // x > 1
  EXPECT_TRUE(open.IsEmpty());
  Polytope touch = box.Intersect(Polytope::Box(Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2)));
  EXPECT_FALSE(touch.IsEmpty());
  EXPECT_FALSE(Polytope::Universe(3).IsEmpty());
}

TEST(LinearConstraintTest, NegationFlipsStrictness) {
  const LinearConstraint c = LinearConstraint::Upper(2, 1, 3.0);
  const LinearConstraint n = c.Negated();
  EXPECT_TRUE(n.strict);
  EXPECT_FALSE(n.SatisfiedBy(Eigen::Vector2d(0, 3)));
  EXPECT_TRUE(n.SatisfiedBy(Eigen::Vector2d(0, 3.5)));
  EXPECT_FALSE(n.Negated().strict);
  EXPECT_TRUE(RationalConstraint::From(c).SatisfiedBy({0, 3}));
  EXPECT_FALSE(RationalConstraint::From(n).SatisfiedBy({0, 3}));
}

TEST(PiecewiseAffineTest, StepRequiresUniquePiece) {
  PiecewiseAffineSystem sys(1);
  AffinePiece neg{{LinearConstraint::Upper(1, 0, 0.0)}, Eigen::MatrixXd::Constant(1, 1, -1),
                  Eigen::VectorXd::Zero(1)};
  AffinePiece pos{{LinearConstraint::Lower(1, 0, 0.0, true)}, Eigen::MatrixXd::Constant(1, 1, 2),
                  Eigen::VectorXd::Constant(1, 1)};
  sys.AddPiece(neg);
  sys.AddPiece(pos);
  EXPECT_EQ(sys.Step(Eigen::VectorXd::Constant(1, -2))[0], 2);
  EXPECT_EQ(sys.Step(Eigen::VectorXd::Constant(1, 0))[0], 0);
  EXPECT_EQ(sys.Step(Eigen::VectorXd::Constant(1, 1))[0], 3);
  sys.AddPiece(neg);
  EXPECT_THROW(sys.Step(Eigen::VectorXd::Constant(1, -1)), std::runtime_error);
}

TEST(PolynomialTest, ArithmeticAndEvaluation) {
  const Polynomial x = Polynomial::Variable(2, 0), y = Polynomial::Variable(2, 1);
  const Polynomial p = x * x * y - 3.0 * y + Polynomial::Constant(2, 2);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_DOUBLE_EQ(p.Evaluate(Eigen::Vector2d(2, 5)), 20 - 15 + 2);
  EXPECT_DOUBLE_EQ(p.Derivative(0).Evaluate(Eigen::Vector2d(2, 5)), 20);
  EXPECT_EQ(p.HomogeneousPart(1).num_terms(), 1u);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ(p.MultiplyTruncated(p, 3).degree(), 3);
  const Polynomial sub = p.Substitute({y, x});
  EXPECT_DOUBLE_EQ(sub.Evaluate(Eigen::Vector2d(5, 2)), p.Evaluate(Eigen::Vector2d(2, 5)));
}

TEST(PolynomialTest, SeriesMatchLibm) {
  const Polynomial x = Polynomial::Variable(1, 0);
  const Polynomial s = SeriesSin(x, 7), c = SeriesCos(x, 6), r = SeriesReciprocal(2.0, x, 8);
  for (double v : {-0.2, 0.05, 0.3}) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, v);
    EXPECT_NEAR(s.Evaluate(p), std::sin(v), 1e-6);
    EXPECT_NEAR(c.Evaluate(p), std::cos(v), 1e-6);
    EXPECT_NEAR(r.Evaluate(p), 1.0 / (2.0 + v), 1e-6);
  }
}

}  // namespace
}  // namespace vpk
