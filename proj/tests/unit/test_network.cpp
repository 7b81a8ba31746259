#include <doctest.h>

#include <stdexcept>

#include "sqlayer/network.hpp"

using namespace sqlayer;

TEST_CASE("bundled fixtures validate with the expected dimensions") {
  const auto f2 = fixtures::fig2();
  CHECK(validate(f2).ok());
  CHECK(f2.layer_count("bob1") == 2);
  CHECK(f2.layer_count("bob2") == 1);
  CHECK(participant_dimension(f2, "alice") == 4);
  CHECK(participant_dimension(f2, "bob1") == 4);
  CHECK(participant_dimension(f2, "bob2") == 2);
  CHECK(f2.register_order() == std::vector<std::string>{"alice", "bob1", "bob2"});

  const auto f5 = fixtures::fig5();
  CHECK(validate(f5).ok());
  for (const char* b : {"bob1", "bob2", "bob3", "bob4", "bob5"}) CHECK(f5.layer_count(b) == 2);
  CHECK(participant_dimension(f5, "bob5") == 4);
  CHECK(participant_dimension(f5, "alice") == 1);
  CHECK_FALSE(f5.subsystem_of("alice"));
  CHECK(f5.register_order().size() == 5);

  const auto f6 = fixtures::fig6();
  CHECK(validate(f6).ok());
  CHECK(layer_kind(f6, f6.layer(1), ProtocolKind::ILSKSS) == LayerKind::Dishonest);
  CHECK(layer_kind(f6, f6.layer(2), ProtocolKind::ILSKSS) == LayerKind::Mixed);
  CHECK(layer_kind(f6, f6.layer(2), ProtocolKind::LSQKD) == LayerKind::Honest);
  CHECK(layer_kind(f6, f6.layer(2), ProtocolKind::LSQSS) == LayerKind::Dishonest);
  CHECK(fixtures::by_name("fig6"));
  CHECK_FALSE(fixtures::by_name("fig7"));
}

TEST_CASE("validation catches malformed networks") {
  auto alice = Participant{"alice", Role::QP, Honesty::Honest};
  auto bob = Participant{"bob", Role::CP, Honesty::Honest};
  auto carol = Participant{"carol", Role::CP, Honesty::Honest};

  CHECK_FALSE(validate(NetworkSpec({alice, bob}, {{1, {"bob"}}}, false)).ok());
  CHECK_FALSE(validate(NetworkSpec({bob, carol}, {{1, {"bob", "carol"}}}, false)).ok());
  CHECK_FALSE(validate(NetworkSpec({alice, bob, carol}, {{1, {"bob", "bob"}}}, false)).ok());
  CHECK_FALSE(validate(NetworkSpec({alice, bob, carol}, {{1, {"bob", "dave"}}}, false)).ok());
  // carol is in no layer
  CHECK_FALSE(validate(NetworkSpec({alice, bob, carol}, {{1, {"alice", "bob"}}}, true)).ok());
  // Alice listed in a layer without qp_is_member
  CHECK_FALSE(validate(NetworkSpec({alice, bob}, {{1, {"alice", "bob"}}}, false)).ok());
  CHECK_FALSE(validate(NetworkSpec({alice, bob, carol}, {{0, {"bob", "carol"}}}, false)).ok());
  CHECK_FALSE(validate(NetworkSpec({alice, bob, carol},
                                   {{1, {"bob", "carol"}}, {1, {"bob", "carol"}}}, false))
                  .ok());

  auto twin = validate(NetworkSpec({alice, bob, carol},
                                   {{1, {"bob", "carol"}}, {2, {"carol", "bob"}}}, false));
  CHECK(twin.ok());
  CHECK(twin.warnings.size() == 1);
}

TEST_CASE("bit routing sends the MSB to the lowest layer id") {
  const auto f2 = fixtures::fig2();
  CHECK(f2.layers_of("bob1") == std::vector<int>{1, 2});
  CHECK(f2.bit_shift("bob1", 1) == 1);
  CHECK(f2.bit_shift("bob1", 2) == 0);
  CHECK(f2.bit_shift("bob2", 2) == 0);
  CHECK(routed_bit(f2, "alice", 1, 2) == 1);
  CHECK(routed_bit(f2, "alice", 2, 2) == 0);
  CHECK(routed_bit(f2, "bob2", 2, 1) == 1);
  CHECK_THROWS(f2.bit_shift("bob2", 1));
  CHECK_THROWS_AS(participant_dimension(f2, "nobody"), std::out_of_range);
}

TEST_CASE("protocol names") {
  CHECK(parse_protocol("lsqkd") == ProtocolKind::LSQKD);
  CHECK(parse_protocol("LSQSS") == ProtocolKind::LSQSS);
  CHECK(parse_protocol("IlSkSs") == ProtocolKind::ILSKSS);
  CHECK(to_string(ProtocolKind::ILSKSS) == "ilskss");
  CHECK_THROWS_AS(parse_protocol("bb84"), std::invalid_argument);
}

TEST_CASE("honesty only matters for ILSKSS") {
  const auto f6 = fixtures::fig6();
  CHECK(is_dishonest_in(f6, "bob1", ProtocolKind::ILSKSS));
  CHECK_FALSE(is_dishonest_in(f6, "bob3", ProtocolKind::ILSKSS));
  CHECK_FALSE(is_dishonest_in(f6, "bob1", ProtocolKind::LSQKD));
  CHECK(is_dishonest_in(f6, "bob3", ProtocolKind::LSQSS));
}
