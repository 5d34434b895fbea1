#include "cbop/moments_io.hpp"

namespace cbop {

namespace {

nlohmann::json weight_to_json(const HalfLineWeight& w) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& c : w.poly) poly.push_back(to_string(c));
  return {{"power", to_string(w.power)}, {"poly", poly}, {"rate", to_string(w.rate)}};
}

HalfLineWeight weight_from_json(const nlohmann::json& j) {
  HalfLineWeight w;
  w.power = parse_rational(j.at("power").get<std::string>());
  w.poly.clear();
  for (const auto& c : j.at("poly")) w.poly.push_back(parse_rational(c.get<std::string>()));
  w.rate = parse_rational(j.at("rate").get<std::string>());
  return w;
}

}  // namespace

nlohmann::json params_to_json(const ModelParams& p) {
  nlohmann::json j = {{"weight", to_string(p.family)},
                      {"a", to_string(p.a)},
                      {"b", to_string(p.b)},
                      {"k1", p.k1},
                      {"k2", p.k2},
                      {"t", to_string(p.t)},
                      {"mode", to_string(p.mode)},
                      {"precision", p.precision}};
  if (p.family == WeightFamily::custom) {
    j["w1"] = weight_to_json(p.w1);
    j["w2"] = weight_to_json(p.w2);
  }
  return j;
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  const auto family = j.at("weight").get<std::string>();
  if (family == "laguerre") {
    p.family = WeightFamily::laguerre;
  } else if (family == "custom") {
    p.family = WeightFamily::custom;
    p.w1 = weight_from_json(j.at("w1"));
    p.w2 = weight_from_json(j.at("w2"));
  } else {
    throw ConfigError("unknown weight family '" + family + "'");
  }
  p.a = parse_rational(j.at("a").get<std::string>());
  p.b = parse_rational(j.at("b").get<std::string>());
  p.k1 = j.at("k1").get<int>();
  p.k2 = j.at("k2").get<int>();
  p.t = parse_rational(j.at("t").get<std::string>());
  p.mode = parse_mode(j.at("mode").get<std::string>());
  p.precision = j.at("precision").get<unsigned>();
  return p;
}

}  // namespace cbop
