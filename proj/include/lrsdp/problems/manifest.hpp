#pragma once
#include <cstdint>
#include <map>
#include <string>

#include "lrsdp/core/types.hpp"
#include "lrsdp/util/json.hpp"

namespace lrsdp {

// Reproduction recipe for a synthetic instance: generator kind, integer
// parameters, and seed. Serialized as JSON so a generated instance can be
// rebuilt bit-for-bit from the manifest alone.
struct InstanceManifest {
  std::string kind;
  std::map<std::string, long long> params;  // ordered: canonical serialization
  std::uint64_t seed = 0;
};

inline std::string manifest_to_json(const InstanceManifest& man) {
  json::Value v = json::Value::object();
  v.set("kind", json::Value::of(man.kind));
  json::Value params = json::Value::object();
  for (const auto& [key, val] : man.params)
    params.set(key, json::Value::of(static_cast<double>(val)));
  v.set("params", std::move(params));
  if (man.seed <= (1ull << 53))
    v.set("seed", json::Value::of(static_cast<double>(man.seed)));
  else
    v.set("seed", json::Value::of(std::to_string(man.seed)));
  return json::dump(v, 2);
}

inline InstanceManifest manifest_from_json(const std::string& text) {
  const json::Value v = json::parse(text);
  const json::Value* kind = v.find("kind");
  const json::Value* params = v.find("params");
  const json::Value* seed = v.find("seed");
  require(kind != nullptr && params != nullptr && seed != nullptr,
          "manifest needs kind, params, and seed");

  InstanceManifest man;
  man.kind = kind->as_string();
  for (const auto& [key, val] : params->as_object())
    man.params[key] = val.as_int64();
  if (seed->kind == json::Value::Kind::String)
    man.seed = std::stoull(seed->as_string());
  else
    man.seed = static_cast<std::uint64_t>(seed->as_int64());
  return man;
}

}  // namespace lrsdp
