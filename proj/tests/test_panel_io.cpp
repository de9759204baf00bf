#include <doctest.h>

#include "fixtures.hpp"
#include "interop/panel.hpp"

using namespace interop;
using fixtures::TempDir;

static std::string chain_csv(const std::string& rows) {
  return std::string(fixtures::kChainHeader) + "\n" + rows;
}

static std::string flow_csv(const std::string& rows) {
  return std::string(fixtures::kFlowHeader) + "\n" + rows;
}

TEST_CASE("chain panel identity load") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "chains.csv",
      chain_csv("a,2023-05-01,1.02e9,1200,35,5e6,1.2e4,0.5,1820.5,3.1e8\n"));
  ChainPanel panel = load_chain_panel(path, tax);
  REQUIRE(panel.rows.size() == 1);
  CHECK(panel.rows[0].chain_id == "a");
  CHECK(panel.rows[0].date == Date::parse("2023-05-01"));
  CHECK(*panel.rows[0].tvl_usd == doctest::Approx(1.02e9));
  CHECK(*panel.rows[0].daily_active_users == 1200);
}

TEST_CASE("alias substitution maps through the alias table") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "chains.csv", chain_csv("bsc,2023-05-01,1e9,1,1,1,1,1,1,1\n"));
  ChainPanel panel = load_chain_panel(path, tax);
  REQUIRE(panel.rows.size() == 1);
  CHECK(panel.rows[0].chain_id == "bnb_chain");
}

TEST_CASE("duplicate (chain,date) key is rejected") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write("chains.csv",
                        chain_csv("a,2023-05-01,1,1,1,1,1,1,1,1\n"
                                  "a,2023-05-01,2,2,2,2,2,2,2,2\n"));
  CHECK_THROWS_WITH_AS(load_chain_panel(path, tax),
                       doctest::Contains("DuplicateKey"), Error);
}

TEST_CASE("unknown chain fails hard") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write("chains.csv",
                        chain_csv("mystery,2023-05-01,1,1,1,1,1,1,1,1\n"));
  CHECK_THROWS_AS(load_chain_panel(path, tax), Error);
}

TEST_CASE("missing required column is a schema mismatch") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write("chains.csv", "chain_id,date\na,2023-05-01\n");
  CHECK_THROWS_WITH_AS(load_chain_panel(path, tax),
                       doctest::Contains("SchemaMismatch"), Error);
}

TEST_CASE("header match is case-insensitive and order-free") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "chains.csv",
      "DATE,Chain_ID,tvl_usd,daily_active_users,new_contracts_count,"
      "total_gas_used,total_gas_usd,median_gas_usd,close_price_usd,volume_usd\n"
      "2023-05-01,a,5,1,1,1,1,1,1,1\n");
  ChainPanel panel = load_chain_panel(path, tax);
  REQUIRE(panel.rows.size() == 1);
  CHECK(*panel.rows[0].tvl_usd == 5.0);
}

TEST_CASE("negative values are rejected, nulls pass through") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto bad = dir.write("bad.csv", chain_csv("a,2023-05-01,-1,1,1,1,1,1,1,1\n"));
  CHECK_THROWS_AS(load_chain_panel(bad, tax), Error);
  auto ok = dir.write("ok.csv", chain_csv("a,2023-05-01,,1,1,1,1,1,1,1\n"));
  ChainPanel panel = load_chain_panel(ok, tax);
  CHECK_FALSE(panel.rows[0].tvl_usd.has_value());
}

TEST_CASE("rows outside the study window are dropped and counted") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write("chains.csv",
                        chain_csv("a,2021-12-31,1,1,1,1,1,1,1,1\n"
                                  "a,2022-01-01,1,1,1,1,1,1,1,1\n"));
  ChainPanel panel = load_chain_panel(path, tax);
  CHECK(panel.rows.size() == 1);
  CHECK(panel.dropped_out_of_window == 1);
}

TEST_CASE("extra columns ride along as passthrough") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "chains.csv",
      std::string(fixtures::kChainHeader) + ",mystery_col\n" +
          "a,2023-05-01,1,1,1,1,1,1,1,1,hello\n");
  ChainPanel panel = load_chain_panel(path, tax);
  REQUIRE(panel.rows[0].extra.count("mystery_col") == 1);
  CHECK(panel.rows[0].extra.at("mystery_col") == "hello");
}

TEST_CASE("flow panel basic load and rollup") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "flows.csv",
      flow_csv("wormhole,a,c,2024-01-02,10,5,5000,500,,,,,,,,\n"
               "hopv2,a,b,2024-01-02,3,,,,,,,,,,,\n"));
  FlowPanel panel = load_flow_panel(path, tax);
  REQUIRE(panel.rows.size() == 2);
  CHECK(panel.bridge_ids() == std::set<std::string>{"hop", "wormhole"});
}

TEST_CASE("self-loop corridor is rejected") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write("flows.csv",
                        flow_csv("wormhole,a,a,2024-01-02,10,,,,,,,,,,,\n"));
  CHECK_THROWS_WITH_AS(load_flow_panel(path, tax),
                       doctest::Contains("SelfLoop"), Error);
}

TEST_CASE("q1 > q3 in the value summary is an order violation") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "flows.csv",
      flow_csv("wormhole,a,c,2024-01-02,10,,5000,,,,,0,9,5,2,10\n"));
  CHECK_THROWS_WITH_AS(load_flow_panel(path, tax),
                       doctest::Contains("SummaryOrderViolation"), Error);
}

TEST_CASE("loading is idempotent") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto path = dir.write(
      "flows.csv",
      flow_csv("wormhole,a,c,2024-01-02,10,5,5000,500,,,,1,2,3,4,5\n"
               "hop,a,b,2024-01-03,3,,,,,,,,,,,\n"));
  FlowPanel one = load_flow_panel(path, tax);
  FlowPanel two = load_flow_panel(path, tax);
  REQUIRE(one.rows.size() == two.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].bridge_id == two.rows[i].bridge_id);
    CHECK(one.rows[i].date == two.rows[i].date);
    CHECK(one.rows[i].total_amount_usd == two.rows[i].total_amount_usd);
  }
}

TEST_CASE("dates round-trip through ISO formatting") {
  for (const char* iso : {"2022-01-01", "2023-07-06", "2024-02-29",
                          "2025-10-31", "2022-12-31"}) {
    CHECK(Date::parse(iso).to_string() == iso);
  }
}

TEST_CASE("validation report") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto chains = load_chain_panel(
      dir.write("chains.csv", chain_csv("a,2023-05-01,1,1,1,1,1,1,1,1\n"
                                        "a,2023-05-02,1,1,1,1,1,1,1,1\n"
                                        "a,2023-05-04,1,1,1,1,1,1,1,1\n")),
      tax);

  // 10 flow rows, 4 of them with null total_fee_usd; one endpoint ("ronin")
  // has no chain attributes
  std::string rows;
  for (int i = 0; i < 10; ++i) {
    std::string day = "2023-05-0" + std::to_string(1 + i % 9);
    std::string dst = i == 0 ? "ronin" : "b";
    std::string fee = i < 4 ? "" : "7.5";
    std::string bridge = i % 2 ? "hop" : "wormhole";
    rows += bridge + ",a," + dst + "," + day + ",1,,100,,"+ fee + ",,,,,,,\n";
  }
  auto flows = load_flow_panel(dir.write("flows.csv", flow_csv(rows)), tax);
  REQUIRE(flows.rows.size() == 10);

  ValidationReport rep = validate_panels(chains, flows, tax);
  CHECK(rep.missing_chain_attributes ==
        std::vector<std::string>{"b", "ronin"});
  CHECK(rep.coverage_gaps.at("a") == 1);  // 2023-05-03 missing
  CHECK(rep.null_rate.at("total_fee_usd") == doctest::Approx(0.40));
}

TEST_CASE("flow chain ids are a subset of chain panel plus whitelisted") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  auto flows = load_flow_panel(
      dir.write("flows.csv",
                flow_csv("wormhole,a,ronin,2024-01-02,1,,,,,,,,,,,\n")),
      tax);
  for (const auto& id : flows.chain_ids()) {
    CHECK((tax.chains.count(id) || tax.endpoint_only_chains.count(id)));
  }
  CHECK_THROWS_AS(
      load_flow_panel(
          dir.write("bad.csv",
                    flow_csv("wormhole,a,not_whitelisted,2024-01-02,1,,,,,,,,,,,\n")),
          tax),
      Error);
}
