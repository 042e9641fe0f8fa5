#include "vpk/registry.h"

#include <stdexcept>

#include "vpk/cartpole.h"
#include "vpk/duelpong.h"
#include "vpk/figure2.h"
#include "vpk/toypong.h"

namespace vpk {

std::vector<std::string> EnvironmentIds() {
  return {"cartpole", "toypong", "duelpong", "figure2"};
}

std::unique_ptr<Environment> MakeEnvironment(const std::string& id,
                                             const nlohmann::json& params) {
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  if (id == "cartpole") return std::make_unique<CartPoleEnv>(CartPoleParams::FromJson(p));
  if (id == "toypong") return std::make_unique<ToyPongEnv>(ToyPongParams::FromJson(p));
  if (id == "duelpong") return std::make_unique<DuelPongEnv>(DuelPongParams::FromJson(p));
  if (id == "figure2") {
    const int k = p.value("k", 5);
    const double alpha = p.value("alpha", 0.5);
    return std::make_unique<TabularEnvironment>(
        std::make_shared<TabularMdp>(figure2::Make(k, alpha)), "figure2");
  }
  throw std::invalid_argument("unknown environment id: " + id);
}

nlohmann::json DefaultEnvironmentParams(const std::string& id) {
  if (id == "cartpole") return CartPoleParams{}.ToJson();
  if (id == "toypong") return ToyPongParams{}.ToJson();
  if (id == "duelpong") return DuelPongParams{}.ToJson();
  if (id == "figure2") return {{"k", 5}, {"alpha", 0.5}};
  throw std::invalid_argument("unknown environment id: " + id);
}

}  // namespace vpk
