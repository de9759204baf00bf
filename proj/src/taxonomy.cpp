#include <fstream>

#include "interop/csv.hpp"
#include "interop/panel.hpp"
#include "json.hpp"

namespace interop {

namespace {

using nlohmann::json;

ChainStack parse_stack(const std::string& s) {
  auto t = lower(s);
  if (t == "l1") return ChainStack::L1;
  if (t == "l2") return ChainStack::L2;
  if (t == "sidechain") return ChainStack::Sidechain;
  throw Error(ErrorCode::BadConfig, "unknown stack '" + s + "'");
}

BridgeCategory parse_category(const std::string& s) {
  auto t = lower(s);
  if (t == "official" || t == "canonical") return BridgeCategory::Official;
  if (t == "third_party" || t == "third-party" || t == "token protocol" ||
      t == "underlying protocol") {
    return BridgeCategory::ThirdParty;
  }
  throw Error(ErrorCode::BadConfig, "unknown bridge category '" + s + "'");
}

BridgeMechanism parse_mechanism(const std::string& s) {
  auto t = lower(s);
  if (t == "lock_and_mint" || t == "lnm") return BridgeMechanism::LockAndMint;
  if (t == "burn_and_mint" || t == "bnm") return BridgeMechanism::BurnAndMint;
  if (t == "liquidity_pool" || t == "lp") return BridgeMechanism::LiquidityPool;
  throw Error(ErrorCode::BadConfig, "unknown bridge mechanism '" + s + "'");
}

}  // namespace

Taxonomy Taxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, path + ": " + e.what());
  }

  Taxonomy tax;
  if (j.contains("study_window")) {
    tax.study_window.start = Date::parse(j["study_window"].at("start"));
    tax.study_window.end = Date::parse(j["study_window"].at("end"));
  }
  const json aliases = j.value("chain_aliases", json::object());
  for (auto& [raw, canon] : aliases.items()) {
    tax.chain_aliases.emplace(lower(raw), lower(canon.get<std::string>()));
  }
  const json rollups = j.value("bridge_rollups", json::object());
  for (auto& [raw, canon] : rollups.items()) {
    tax.bridge_rollups.emplace(lower(raw), lower(canon.get<std::string>()));
  }
  for (auto& id : j.value("endpoint_only_chains", json::array())) {
    tax.endpoint_only_chains.insert(lower(id.get<std::string>()));
  }
  for (auto& c : j.value("chains", json::array())) {
    ChainMeta m;
    m.chain_id = lower(c.at("chain_id").get<std::string>());
    m.stack = parse_stack(c.value("stack", "L1"));
    m.is_evm = c.value("is_evm", false);
    if (c.contains("is_l1") && c["is_l1"].get<bool>() != m.is_l1()) {
      throw Error(ErrorCode::BadConfig,
                  m.chain_id + ": is_l1 inconsistent with stack");
    }
    m.ecosystem = c.value("ecosystem", "");
    m.has_canonical_bridge = c.value("has_canonical_bridge", false);
    tax.chains.emplace(m.chain_id, m);
  }
  for (auto& b : j.value("bridges", json::array())) {
    BridgeMeta m;
    m.bridge_id = lower(b.at("bridge_id").get<std::string>());
    // "category" may carry free-form labels; all map onto the
    // official/third_party split.
    m.category = parse_category(b.value("category", "third_party"));
    m.mechanism = parse_mechanism(b.value("mechanism", "lock_and_mint"));
    m.created = Date::parse(b.value("created", "2022-01-01"));
    if (b.contains("end_of_life") && !b["end_of_life"].is_null()) {
      m.end_of_life = Date::parse(b["end_of_life"].get<std::string>());
      if (m.created > *m.end_of_life) {
        throw Error(ErrorCode::BadConfig,
                    m.bridge_id + ": created after end_of_life");
      }
    }
    tax.bridges.emplace(m.bridge_id, m);
  }
  return tax;
}

std::string Taxonomy::resolve_chain(const std::string& raw) const {
  std::string id = lower(raw);
  if (auto it = chain_aliases.find(id); it != chain_aliases.end()) {
    id = it->second;
  }
  if (chains.count(id) || endpoint_only_chains.count(id)) return id;
  throw Error(ErrorCode::UnknownChain, raw);
}

std::string Taxonomy::resolve_bridge(const std::string& raw) const {
  std::string id = lower(raw);
  if (auto it = bridge_rollups.find(id); it != bridge_rollups.end()) {
    id = it->second;
  }
  if (!bridges.count(id)) throw Error(ErrorCode::UnknownBridge, raw);
  return id;
}

const ChainMeta& Taxonomy::chain(const std::string& id) const {
  auto it = chains.find(id);
  if (it == chains.end()) throw Error(ErrorCode::UnknownChain, id);
  return it->second;
}

const BridgeMeta& Taxonomy::bridge(const std::string& id) const {
  auto it = bridges.find(id);
  if (it == bridges.end()) throw Error(ErrorCode::UnknownBridge, id);
  return it->second;
}

}  // namespace interop
