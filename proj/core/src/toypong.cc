#include "vpk/toypong.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace vpk {

void ToyPongParams::Validate() const {
  if (!(x_max > 0 && y_max > 0)) throw std::invalid_argument("toy pong court must be positive");
  if (!(v_min > 0 && v_min < v_max)) {
    throw std::invalid_argument("toy pong needs 0 < v_min < v_max");
  }
  if (!(half_paddle > 0 && half_paddle < x_max / 2)) {
    throw std::invalid_argument("toy pong needs 0 < L < x_max / 2");
  }
  if (!(paddle_speed > 0)) throw std::invalid_argument("toy pong paddle_speed must be positive");
  if (max_steps < 0) throw std::invalid_argument("toy pong max_steps < 0");
  if (!(init_y_fraction >= 0 && init_y_fraction <= 1)) {
    throw std::invalid_argument("toy pong init_y_fraction must lie in [0, 1]");
  }
}

nlohmann::json ToyPongParams::ToJson() const {
  return {{"x_max", x_max},          {"y_max", y_max},
          {"v_min", v_min},          {"v_max", v_max},
          {"L", half_paddle},        {"paddle_speed", paddle_speed},
          {"max_steps", max_steps},  {"init_y_fraction", init_y_fraction}};
}

ToyPongParams ToyPongParams::FromJson(const nlohmann::json& j) {
  ToyPongParams p;
  p.x_max = j.value("x_max", p.x_max);
  p.y_max = j.value("y_max", p.y_max);
  p.v_min = j.value("v_min", p.v_min);
  p.v_max = j.value("v_max", p.v_max);
  p.half_paddle = j.value("L", p.half_paddle);
  p.paddle_speed = j.value("paddle_speed", p.paddle_speed);
  p.max_steps = j.value("max_steps", p.max_steps);
  p.init_y_fraction = j.value("init_y_fraction", p.init_y_fraction);
  p.Validate();
  return p;
}

namespace {

double PaddleDelta(const ToyPongParams& p, int action) {
  switch (action) {
    case kPaddleLeft:
      return -p.paddle_speed;
    case kPaddleRight:
      return p.paddle_speed;
    case kPaddleStay:
      return 0.0;
    default:
      throw std::invalid_argument("toy pong action must be 0, 1 or 2");
  }
}

}  // namespace

ToyPongTransition ToyPongStep(const ToyPongParams& p,
                              const Eigen::Ref<const Eigen::VectorXd>& s,
                              int action) {
  if (s.size() != 5) throw std::invalid_argument("toy pong state must be 5-D");
  ToyPongTransition out;
  out.state = s;
  StateVector& n = out.state;

  const double delta = PaddleDelta(p, action);
  if (delta != 0.0) {
    const double moved = s[kPaddleX] + delta;
    if (moved < 0.0) {
      n[kPaddleX] = 0.0;
    } else if (moved > p.x_max) {
      n[kPaddleX] = p.x_max;
    } else {
      n[kPaddleX] = moved;
    }
  }

  const double x = s[kBallX] + s[kBallVx];
  if (x < 0.0) {
    n[kBallX] = -x;
    n[kBallVx] = -s[kBallVx];
  } else if (x > p.x_max) {
    n[kBallX] = 2.0 * p.x_max - x;
    n[kBallVx] = -s[kBallVx];
  } else {
    n[kBallX] = x;
  }

  const double y = s[kBallY] + s[kBallVy];
  if (y > p.y_max) {
    n[kBallY] = 2.0 * p.y_max - y;
    n[kBallVy] = -s[kBallVy];
  } else if (y <= 0.0) {
    const double offset = n[kBallX] - n[kPaddleX];
    if (offset <= p.half_paddle && -offset <= p.half_paddle) {
      n[kBallY] = -y;
      n[kBallVy] = -s[kBallVy];
    } else {
      n[kBallY] = y;
      out.done = true;
    }
  } else {
    n[kBallY] = y;
  }
  return out;
}

int ToyPongHorizon(const ToyPongParams& p) {
  return static_cast<int>(std::ceil(2.0 * p.y_max / p.v_min));
}

namespace {

// An affine function of the state: row . s + constant.
struct AffineForm {
  Eigen::RowVectorXd row;
  double constant = 0.0;
};

AffineForm Form(std::initializer_list<double> coeffs, double constant) {
  AffineForm f{Eigen::RowVectorXd(5), constant};
  int i = 0;
  for (double c : coeffs) f.row[i++] = c;
  return f;
}

// form(s) <= bound (or < bound).
LinearConstraint AtMost(const AffineForm& f, double bound, bool strict) {
  return {f.row.transpose(), bound - f.constant, strict};
}

// form(s) >= bound (or > bound).
LinearConstraint AtLeast(const AffineForm& f, double bound, bool strict) {
  return {-f.row.transpose(), f.constant - bound, strict};
}

struct Case {
  std::vector<LinearConstraint> guard;
  std::string label;
};

}  // namespace

PiecewiseAffineSystem ToyPongPwa(const ToyPongParams& p) {
  p.Validate();
  PiecewiseAffineSystem system(5);

  const AffineForm ball_x_sum = Form({1, 0, 1, 0, 0}, 0.0);
  const AffineForm ball_y_sum = Form({0, 1, 0, 1, 0}, 0.0);
  const AffineForm paddle = Form({0, 0, 0, 0, 1}, 0.0);

  for (int action : {kPaddleLeft, kPaddleRight, kPaddleStay}) {
    const double delta = PaddleDelta(p, action);

    // Paddle cases: successor paddle position as an affine form.
    std::vector<std::pair<Case, AffineForm>> paddle_cases;
    if (delta < 0) {
      paddle_cases.push_back({{{AtMost(paddle, -delta, true)}, "clamp0"},
                              Form({0, 0, 0, 0, 0}, 0.0)});
      paddle_cases.push_back({{{AtLeast(paddle, -delta, false)}, "left"},
                              Form({0, 0, 0, 0, 1}, delta)});
    } else if (delta > 0) {
      paddle_cases.push_back({{{AtMost(paddle, p.x_max - delta, false)}, "right"},
                              Form({0, 0, 0, 0, 1}, delta)});
      paddle_cases.push_back({{{AtLeast(paddle, p.x_max - delta, true)}, "clampmax"},
                              Form({0, 0, 0, 0, 0}, p.x_max)});
    } else {
      paddle_cases.push_back({{{}, "stay"}, Form({0, 0, 0, 0, 1}, 0.0)});
    }

    // Ball x cases: (guard, successor x form, vx sign).
    struct XCase {
      Case c;
      AffineForm x;
      double vx_sign;
    };
    const std::vector<XCase> x_cases = {
        {{{AtMost(ball_x_sum, 0.0, true)}, "wallL"}, Form({-1, 0, -1, 0, 0}, 0.0), -1.0},
        {{{AtLeast(ball_x_sum, 0.0, false), AtMost(ball_x_sum, p.x_max, false)}, "free"},
         Form({1, 0, 1, 0, 0}, 0.0), 1.0},
        {{{AtLeast(ball_x_sum, p.x_max, true)}, "wallR"},
         Form({-1, 0, -1, 0, 0}, 2.0 * p.x_max), -1.0},
    };

    for (const auto& [pcase, paddle_next] : paddle_cases) {
      for (const auto& xc : x_cases) {
        // Paddle offset after the move: x' - xp'.
        const AffineForm offset{xc.x.row - paddle_next.row,
                                xc.x.constant - paddle_next.constant};
        struct YCase {
          Case c;
          AffineForm y;
          double vy_sign;
        };
        const std::vector<YCase> y_cases = {
            {{{AtLeast(ball_y_sum, p.y_max, true)}, "top"},
             Form({0, -1, 0, -1, 0}, 2.0 * p.y_max), -1.0},
            {{{AtLeast(ball_y_sum, 0.0, true), AtMost(ball_y_sum, p.y_max, false)}, "fly"},
             Form({0, 1, 0, 1, 0}, 0.0), 1.0},
            {{{AtMost(ball_y_sum, 0.0, false), AtMost(offset, p.half_paddle, false),
               AtLeast(offset, -p.half_paddle, false)},
              "hit"},
             Form({0, -1, 0, -1, 0}, 0.0), -1.0},
            {{{AtMost(ball_y_sum, 0.0, false), AtMost(offset, -p.half_paddle, true)},
              "missL"},
             Form({0, 1, 0, 1, 0}, 0.0), 1.0},
            {{{AtMost(ball_y_sum, 0.0, false), AtLeast(offset, p.half_paddle, true)},
              "missR"},
             Form({0, 1, 0, 1, 0}, 0.0), 1.0},
        };
        for (const auto& yc : y_cases) {
          AffinePiece piece;
          piece.action = action;
          piece.label = pcase.label + "/" + xc.c.label + "/" + yc.c.label;
          for (const auto* g : {&pcase.guard, &xc.c.guard, &yc.c.guard}) {
            piece.guard.insert(piece.guard.end(), g->begin(), g->end());
          }
          piece.M = Eigen::MatrixXd::Zero(5, 5);
          piece.c = Eigen::VectorXd::Zero(5);
          piece.M.row(kBallX) = xc.x.row;
          piece.c[kBallX] = xc.x.constant;
          piece.M.row(kBallY) = yc.y.row;
          piece.c[kBallY] = yc.y.constant;
          piece.M(kBallVx, kBallVx) = xc.vx_sign;
          piece.M(kBallVy, kBallVy) = yc.vy_sign;
          piece.M.row(kPaddleX) = paddle_next.row;
          piece.c[kPaddleX] = paddle_next.constant;
          system.AddPiece(std::move(piece));
        }
      }
    }
  }
  return system;
}

ToyPongEnv::ToyPongEnv(ToyPongParams params)
    : params_(params), state_(StateVector::Zero(5)) {
  params_.Validate();
}

StateVector ToyPongEnv::Reset(std::uint64_t seed) {
  Rng rng(seed);
  state_[kBallX] = UniformIn(rng, 0.0, params_.x_max);
  state_[kBallY] = UniformIn(rng, params_.init_y_fraction * params_.y_max, params_.y_max);
  state_[kBallVx] = UniformIn(rng, -params_.v_max, params_.v_max);
  state_[kBallVy] = -UniformIn(rng, params_.v_min, params_.v_max);
  state_[kPaddleX] = params_.x_max / 2.0;
  return state_;
}

void ToyPongEnv::SetState(const StateVector& s) {
  if (s.size() != 5) throw std::invalid_argument("toy pong state must be 5-D");
  state_ = s;
}

StepResult ToyPongEnv::Step(const Action& a) {
  ToyPongTransition t = ToyPongStep(params_, state_, a.index());
  state_ = t.state;
  return {state_, t.done ? 0.0 : 1.0, t.done};
}

std::unique_ptr<Environment> ToyPongEnv::Clone() const {
  return std::make_unique<ToyPongEnv>(*this);
}

}  // namespace vpk
