#include "vpk/action.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vpk/types.h"

namespace vpk {

Action Action::Discrete(int index) {
  if (index < 0) throw std::invalid_argument("negative discrete action index");
  return Action(true, static_cast<double>(index));
}

Action Action::Continuous(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite continuous action");
  }
  return Action(false, value);
}

int Action::index() const {
  if (!discrete_) throw std::logic_error("index() on a continuous action");
  return static_cast<int>(value_);
}

std::string Action::ToString() const {
  std::ostringstream out;
  if (discrete_) {
    out << index();
  } else {
    out.precision(17);
    out << value_;
  }
  return out.str();
}

bool ActionSpace::Contains(const Action& a) const {
  if (is_discrete()) return a.is_discrete() && a.index() < num_discrete;
  return !a.is_discrete() && a.value() >= low && a.value() <= high;
}

void RequireFinite(const StateVector& s, const std::string& what) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) {
      std::ostringstream msg;
      msg << what << ": component " << i << " is not finite (" << s[i] << ")";
      throw std::runtime_error(msg.str());
    }
  }
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace vpk
