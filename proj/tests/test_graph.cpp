#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "interop/graph.hpp"
#include "oracles.hpp"

using namespace interop;
using fixtures::TempDir;

namespace {

HypergraphSnapshot snapshot_of(std::vector<Hyperedge> edges,
                               std::set<std::string> universe) {
  HypergraphSnapshot snap;
  snap.date = Date::parse("2023-01-01");
  snap.hyperedges = std::move(edges);
  snap.chain_universe = std::move(universe);
  return snap;
}

}  // namespace

TEST_CASE("hyperedge weight formula") {
  HypergraphConfig cfg;
  cfg.n_total = 20;
  CHECK(hyperedge_weight(2, cfg) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(hyperedge_weight(20, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  cfg.theta = 2.0;
  CHECK(hyperedge_weight(5, cfg) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("member count out of range") {
  HypergraphConfig cfg;
  cfg.n_total = 20;
  CHECK_THROWS_AS(hyperedge_weight(1, cfg), Error);
  CHECK_THROWS_AS(hyperedge_weight(21, cfg), Error);
}

TEST_CASE("single bridge over three chains projects symmetrically") {
  HypergraphConfig cfg;
  cfg.n_total = 3;
  Hyperedge e{"x", {"A", "B", "C"}, hyperedge_weight(3, cfg)};
  CHECK(e.weight == doctest::Approx(1.0));
  ProjectedGraph g = project(snapshot_of({e}, {"A", "B", "C"}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      CHECK(g.strength(i, j) == doctest::Approx(1.0));
      CHECK(*g.delta(i, j) == doctest::Approx(0.5));
      CHECK(*g.shortest(i, j) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("chain of two pair-bridges (hand-checked 3-node oracle)") {
  HypergraphConfig cfg;
  cfg.n_total = 3;
  double w = hyperedge_weight(2, cfg);
  CHECK(w == doctest::Approx(2.0 / 3.0));
  ProjectedGraph g = project(snapshot_of({{"ab", {"A", "B"}, w},
                                          {"bc", {"B", "C"}, w}},
                                         {"A", "B", "C"}));
  auto idx = [&](const char* c) { return *g.index_of(c); };
  CHECK(*g.delta(idx("A"), idx("B")) == doctest::Approx(0.6));
  CHECK(*g.delta(idx("B"), idx("C")) == doctest::Approx(0.6));
  CHECK_FALSE(g.delta(idx("A"), idx("C")).has_value());
  CHECK(*g.shortest(idx("A"), idx("C")) == doctest::Approx(1.2));
}

TEST_CASE("isolated chain is unreachable, not one hop away") {
  HypergraphConfig cfg;
  cfg.n_total = 3;
  ProjectedGraph g = project(snapshot_of(
      {{"ab", {"A", "B"}, hyperedge_weight(2, cfg)}}, {"A", "B", "D"}));
  auto d = *g.index_of("D");
  auto a = *g.index_of("A");
  CHECK_FALSE(g.shortest(a, d).has_value());
  CHECK_FALSE(g.shortest(d, a).has_value());
  CHECK(*g.shortest(d, d) == 0.0);
}

TEST_CASE("parallel bridges sum strength once per bridge per pair") {
  HypergraphConfig cfg;
  cfg.n_total = 4;
  double w2 = hyperedge_weight(2, cfg);
  double w3 = hyperedge_weight(3, cfg);
  ProjectedGraph g = project(snapshot_of({{"x", {"A", "B"}, w2},
                                          {"y", {"A", "B", "C"}, w3}},
                                         {"A", "B", "C", "D"}));
  CHECK(g.strength(*g.index_of("A"), *g.index_of("B")) ==
        doctest::Approx(w2 + w3));
}

TEST_CASE("shortest paths match Floyd-Warshall on 100 seeded snapshots") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    auto snap = oracles::random_snapshot(rng);
    ProjectedGraph g = project(snap);
    auto ref = oracles::floyd_warshall(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        auto d = g.shortest(i, j);
        if (std::isinf(ref[i][j])) {
          CHECK_FALSE(d.has_value());
        } else {
          REQUIRE(d.has_value());
          CHECK(std::fabs(*d - ref[i][j]) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("adding a hyperedge never increases any distance") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    auto snap = oracles::random_snapshot(rng);
    ProjectedGraph before = project(snap);
    snap.hyperedges.push_back(oracles::random_hyperedge(rng, snap));
    ProjectedGraph after = project(snap);
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (std::size_t j = 0; j < before.size(); ++j) {
        auto d0 = before.shortest(i, j);
        auto d1 = after.shortest(i, j);
        if (d0) {
          REQUIRE(d1.has_value());
          CHECK(*d1 <= *d0 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("projection is exactly symmetric") {
  std::mt19937_64 rng(99);
  auto snap = oracles::random_snapshot(rng);
  ProjectedGraph g = project(snap);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(g.strength(i, j) == g.strength(j, i));
      CHECK(g.shortest(i, j) == g.shortest(j, i));
    }
  }
}

TEST_CASE("scaling alpha scales S and preserves reachability") {
  std::mt19937_64 rng(31337);
  auto snap = oracles::random_snapshot(rng);
  const double c = 3.5;
  auto scaled = snap;
  for (auto& e : scaled.hyperedges) e.weight *= c;
  ProjectedGraph g0 = project(snap);
  ProjectedGraph g1 = project(scaled);
  for (std::size_t i = 0; i < g0.size(); ++i) {
    for (std::size_t j = 0; j < g0.size(); ++j) {
      CHECK(g1.strength(i, j) ==
            doctest::Approx(c * g0.strength(i, j)).epsilon(1e-12));
      CHECK(g0.shortest(i, j).has_value() == g1.shortest(i, j).has_value());
    }
  }
}

TEST_CASE("distances satisfy the triangle inequality and d <= delta") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    auto snap = oracles::random_snapshot(rng);
    ProjectedGraph g = project(snap);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (auto e = g.delta(i, j)) {
          REQUIRE(g.shortest(i, j).has_value());
          CHECK(*g.shortest(i, j) <= *e + 1e-15);
        }
        for (std::size_t k = 0; k < g.size(); ++k) {
          auto dij = g.shortest(i, j);
          auto dik = g.shortest(i, k);
          auto dkj = g.shortest(k, j);
          if (dik && dkj) {
            REQUIRE(dij.has_value());
            CHECK(*dij <= *dik + *dkj + 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("snapshot membership rules") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  // wormhole touches {a,c} on Jan 5, hop touches {a,b} on Jan 1
  std::string csv = std::string(fixtures::kFlowHeader) + "\n" +
                    "hop,a,b,2025-01-01,5,,,,,,,,,,,\n" +
                    "wormhole,a,c,2025-01-05,5,,,,,,,,,,,\n" +
                    "wormhole,c,b,2025-01-06,5,,,,,,,,,,,\n" +
                    "hop,a,b,2025-03-01,5,,,,,,,,,,,\n";
  FlowPanel flows = load_flow_panel(dir.write("flows.csv", csv), tax);
  HypergraphConfig cfg;
  cfg.n_total = 5;

  SUBCASE("cumulative accrual and bridge end of life") {
    auto snaps = build_snapshots(flows, tax, cfg);
    auto at = [&](const char* day) -> const HypergraphSnapshot& {
      for (const auto& s : snaps) {
        if (s.date == Date::parse(day)) return s;
      }
      FAIL("missing snapshot");
      return snaps.front();
    };
    auto members = [](const HypergraphSnapshot& s, const std::string& b)
        -> std::set<std::string> {
      for (const auto& e : s.hyperedges) {
        if (e.bridge_id == b) return e.members;
      }
      return {};
    };
    CHECK(members(at("2025-01-01"), "hop") == std::set<std::string>{"a", "b"});
    CHECK(members(at("2025-01-04"), "wormhole").empty());
    CHECK(members(at("2025-01-05"), "wormhole") ==
          std::set<std::string>{"a", "c"});
    CHECK(members(at("2025-01-06"), "wormhole") ==
          std::set<std::string>{"a", "b", "c"});
    // membership is monotone up to end_of_life (2025-01-10 in the fixture)
    CHECK(members(at("2025-01-10"), "wormhole") ==
          std::set<std::string>{"a", "b", "c"});
    CHECK(members(at("2025-01-11"), "wormhole").empty());
    CHECK(members(at("2025-03-01"), "hop") == std::set<std::string>{"a", "b"});
  }

  SUBCASE("rolling window drops chains inactive past the window") {
    cfg.rule = MembershipRule::RollingWindow;
    cfg.membership_window_days = 30;
    auto snaps = build_snapshots(flows, tax, cfg);
    // replay day by day: hop active on Jan 1 stays a member through Jan 30
    // and drops on Jan 31
    for (const auto& s : snaps) {
      bool has_hop = false;
      for (const auto& e : s.hyperedges) has_hop |= (e.bridge_id == "hop");
      int day = s.date - Date::parse("2025-01-01");
      bool in_first_window = day >= 0 && day <= 29;
      bool in_second_window = s.date >= Date::parse("2025-03-01") &&
                              s.date <= Date::parse("2025-03-01") + 29;
      CHECK(has_hop == (in_first_window || in_second_window));
    }
  }
}

TEST_CASE("snapshot weight matches the member count") {
  TempDir dir;
  auto tax = fixtures::toy_taxonomy(dir);
  std::string csv = std::string(fixtures::kFlowHeader) + "\n" +
                    "wormhole,a,c,2025-01-05,5,,,,,,,,,,,\n" +
                    "wormhole,c,b,2025-01-06,5,,,,,,,,,,,\n";
  FlowPanel flows = load_flow_panel(dir.write("flows.csv", csv), tax);
  HypergraphConfig cfg;
  cfg.n_total = 5;
  for (const auto& s : build_snapshots(flows, tax, cfg)) {
    for (const auto& e : s.hyperedges) {
      CHECK(e.members.size() >= 2);
      CHECK(e.weight ==
            doctest::Approx(hyperedge_weight(int(e.members.size()), cfg))
                .epsilon(1e-12));
    }
  }
}
