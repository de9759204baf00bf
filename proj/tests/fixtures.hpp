#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "interop/panel.hpp"

namespace fixtures {

// RAII temp directory under the system temp root.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto p = base / ("interop_test_" + std::to_string(std::rand()) + "_" +
                       std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(p, ec)) {
        path_ = p;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path path() const { return path_; }

  std::string write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

inline const char* kChainHeader =
    "chain_id,date,tvl_usd,daily_active_users,new_contracts_count,"
    "total_gas_used,total_gas_usd,median_gas_usd,close_price_usd,volume_usd";

inline const char* kFlowHeader =
    "bridge_id,src_chain,dst_chain,date,transfer_count,daily_users,"
    "total_amount_usd,avg_transfer_usd,total_fee_usd,avg_fee_usd,"
    "avg_speed_seconds,value_min,value_q1,value_q2,value_q3,value_max";

// Three chains (a, b, c) and three bridges with mixed categories and
// mechanisms, wide study window.
inline std::string toy_taxonomy_json() {
  return R"({
  "study_window": {"start": "2022-01-01", "end": "2025-10-31"},
  "chain_aliases": {"bsc": "bnb_chain"},
  "bridge_rollups": {"hopv2": "hop"},
  "endpoint_only_chains": ["ronin"],
  "chains": [
    {"chain_id": "a", "stack": "L1", "is_evm": true},
    {"chain_id": "b", "stack": "L2", "is_evm": true},
    {"chain_id": "c", "stack": "L1", "is_evm": false},
    {"chain_id": "bnb_chain", "stack": "L1", "is_evm": true}
  ],
  "bridges": [
    {"bridge_id": "official_ab", "category": "official",
     "mechanism": "lock_and_mint", "created": "2022-01-01"},
    {"bridge_id": "hop", "category": "third_party",
     "mechanism": "liquidity_pool", "created": "2022-01-01"},
    {"bridge_id": "wormhole", "category": "third_party",
     "mechanism": "burn_and_mint", "created": "2022-01-01",
     "end_of_life": "2025-01-10"}
  ]
})";
}

inline interop::Taxonomy toy_taxonomy(const TempDir& dir) {
  return interop::Taxonomy::load(dir.write("meta.json", toy_taxonomy_json()));
}

}  // namespace fixtures
