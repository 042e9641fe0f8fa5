#pragma once

#include <string>

namespace vpk {

/// An action is either an index into a finite action set or a real-valued
/// control input.
class Action {
 public:
  Action() = default;

  static Action Discrete(int index);
  static Action Continuous(double value);

  bool is_discrete() const { return discrete_; }
  /// Throws std::logic_error for continuous actions.
  int index() const;
  /// Continuous value; for discrete actions the index as a double.
  double value() const { return value_; }

  bool operator==(const Action& other) const = default;

  std::string ToString() const;

 private:
  Action(bool discrete, double value) : discrete_(discrete), value_(value) {}

  bool discrete_ = true;
  double value_ = 0.0;
};

/// Describes the admissible actions of an environment.
struct ActionSpace {
  /// Number of discrete actions; zero for a continuous interval.
  int num_discrete = 0;
  double low = 0.0;
  double high = 0.0;

  static ActionSpace Discrete(int n) { return {n, 0.0, 0.0}; }
  static ActionSpace Continuous(double lo, double hi) { return {0, lo, hi}; }

  bool is_discrete() const { return num_discrete > 0; }
  bool Contains(const Action& a) const;
};

}  // namespace vpk
