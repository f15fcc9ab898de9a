#include <doctest.h>

#include "limid/benchmarks.hpp"
#include "limid/diagram.hpp"
#include "limid/error.hpp"
#include "support.hpp"

using namespace limid;
using namespace testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("diagram") {
  TEST_CASE("decision node with an information set implies the arc") {
    InfluenceDiagram d;
    d.add_node(chance("R1", {"high", "low"}));
    const NodeId a = d.add_node(decision("A1", {"fortify", "pass"}, {"R1"}));
    REQUIRE(d.parents(a).size() == 1);
    CHECK(d.node(d.parents(a)[0]).name == "R1");
    CHECK(d.info_state_count(a) == 2);
  }

  TEST_CASE("construction errors") {
    InfluenceDiagram d;
    d.add_node(chance("H", {"a", "b"}));
    CHECK(code_of([&] { d.add_node(chance("L", {"a"}, {"L"})); }) == ErrorCode::SelfReference);
    CHECK(code_of([&] { d.add_node(chance("H", {"a"})); }) == ErrorCode::DuplicateName);
    CHECK(code_of([&] { d.add_node(chance("X", {"a"}, {"Y"})); }) == ErrorCode::UnknownParent);
    CHECK(code_of([&] { d.add_node(chance("E", {})); }) == ErrorCode::EmptyStateSpace);
    d.add_node(value("V", {"H"}));
    CHECK(code_of([&] { d.add_node(chance("Z", {"a"}, {"V"})); }) == ErrorCode::ValueParent);
  }

  TEST_CASE("probability tables") {
    InfluenceDiagram d;
    d.add_node(chance("C", {"a", "b"}));
    d.add_node(chance("K", {"a", "b"}, {"C"}));
    d.set_probabilities("C", {{0.4, 0.6}});
    CHECK(code_of([&] { d.set_probabilities("C", {{0.5, 0.6}}); }) == ErrorCode::NotNormalized);
    CHECK(code_of([&] { d.set_probabilities("C", {{0.2, 0.3, 0.5}}); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { d.set_probabilities("C", {{1.2, -0.2}}); }) == ErrorCode::NegativeProbability);
    CHECK(code_of([&] { d.set_probabilities("K", {{0.5, 0.5}}); }) == ErrorCode::DimensionMismatch);
    // Tolerance is absolute 1e-9 per row, no renormalization.
    d.set_probabilities("K", {{0.5 + 5e-10, 0.5}, {0.3, 0.7}});
    CHECK(code_of([&] { d.set_probabilities("K", {{0.5 + 5e-9, 0.5}, {0.3, 0.7}}); }) == ErrorCode::NotNormalized);
    CHECK(d.probabilities(d.id("K"))[0] == 0.5 + 5e-10);
  }

  TEST_CASE("NotNormalized names the node and information state") {
    InfluenceDiagram d;
    d.add_node(chance("C", {"a", "b"}));
    d.add_node(chance("K", {"x", "y"}, {"C"}));
    try {
      d.set_probabilities("K", {{0.5, 0.5}, {0.5, 0.6}});
      FAIL("expected NotNormalized");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("NotNormalized at K,(b)") == 0);
    }
  }

  TEST_CASE("utility tables") {
    InfluenceDiagram d;
    d.add_node(chance("F", {"failure", "success"}));
    d.add_node(value("T", {"F"}));
    d.add_node(value("K"));
    d.set_utilities("T", {100.0, 0.0});
    CHECK(code_of([&] { d.set_utilities("T", {1.0}); }) == ErrorCode::IncompleteUtilities);
    CHECK(code_of([&] { d.set_utilities("T", {1.0, 2.0, 3.0}); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { d.set_utilities("F", {1.0, 2.0}); }) == ErrorCode::WrongKind);
    d.set_utilities("K", {7.5});
    d.set_probabilities("F", {{0.5, 0.5}});
    d.freeze();
    CHECK(d.utilities(d.id("K")).size() == 1);
  }

  TEST_CASE("N-monitoring n=1 topological order excludes the value node") {
    const InfluenceDiagram d = gen_nmonitoring(1);
    std::vector<std::string> names;
    for (const NodeId id : d.order()) names.push_back(d.node(id).name);
    CHECK(names == std::vector<std::string>{"L", "R1", "A1", "F"});
    CHECK(d.path_count() == 16);
    CHECK(d.warnings().empty());
  }

  TEST_CASE("cycle inside a batch") {
    InfluenceDiagram d;
    const std::vector<Node> batch{chance("A", {"0", "1"}, {"B"}), chance("B", {"0", "1"}, {"A"})};
    CHECK(code_of([&] { d.add_nodes(batch); }) == ErrorCode::CycleDetected);
  }

  TEST_CASE("batch with forward references keeps tie order") {
    InfluenceDiagram d;
    const std::vector<Node> batch{decision("D", {"0", "1"}, {"C"}), chance("C", {"0", "1"}), chance("E", {"0", "1"}),
                                  value("V", {"D"})};
    d.add_nodes(batch);
    d.set_probabilities("C", {{0.5, 0.5}});
    d.set_probabilities("E", {{0.5, 0.5}});
    d.set_utilities("V", {1.0, 2.0});
    d.freeze();
    std::vector<std::string> names;
    for (const NodeId id : d.order()) names.push_back(d.node(id).name);
    CHECK(names == std::vector<std::string>{"C", "D", "E"});
  }

  TEST_CASE("redundant node warning") {
    InfluenceDiagram d;
    d.add_node(chance("C", {"a", "b"}));
    d.add_node(chance("Lonely", {"a", "b"}));
    d.add_node(value("V", {"C"}));
    d.set_probabilities("C", {{0.5, 0.5}});
    d.set_probabilities("Lonely", {{0.5, 0.5}});
    d.set_utilities("V", {1.0, 0.0});
    const auto& warnings = d.freeze();
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("RedundantNodeWarning") == 0);
    CHECK(warnings[0].find("Lonely") != std::string::npos);
  }

  TEST_CASE("missing tensor, frozen and not-frozen errors") {
    InfluenceDiagram d;
    d.add_node(chance("C", {"a", "b"}));
    CHECK(code_of([&] { (void)d.order(); }) == ErrorCode::NotFrozen);
    CHECK(code_of([&] { d.freeze(); }) == ErrorCode::MissingTensor);
    d.set_probabilities("C", {{1.0, 0.0}});
    d.freeze();
    CHECK(code_of([&] { d.add_node(chance("D", {"a"})); }) == ErrorCode::Frozen);
    CHECK(code_of([&] { d.set_probabilities("C", {{0.5, 0.5}}); }) == ErrorCode::Frozen);
  }

  TEST_CASE("freeze is idempotent") {
    InfluenceDiagram d = gen_pigfarm(2);
    const std::vector<NodeId> before(d.order().begin(), d.order().end());
    const auto warnings = d.warnings();
    d.freeze();
    CHECK(std::vector<NodeId>(d.order().begin(), d.order().end()) == before);
    CHECK(d.warnings() == warnings);
  }

  TEST_CASE("information state indexing is row-major over the declared order") {
    InfluenceDiagram d;
    d.add_node(chance("A", {"a0", "a1"}));
    d.add_node(chance("B", {"b0", "b1", "b2"}));
    const NodeId c = d.add_node(chance("C", {"c"}, {"B", "A"}));
    CHECK(d.info_state_count(c) == 6);
    const std::vector<StateIndex> s{2, 1};
    CHECK(d.info_state_index(c, s) == 2 * 2 + 1);
    CHECK(d.decode_info_state(c, 5) == s);
    CHECK(d.info_state_label(c, 5) == "b2,a1");
    for (std::uint64_t i = 0; i < 6; ++i) CHECK(d.info_state_index(c, d.decode_info_state(c, i)) == i);
  }

  TEST_CASE("with_utilities returns a frozen copy") {
    const InfluenceDiagram d = four_strategy_example();
    const InfluenceDiagram e = d.with_utilities(d.id("V"), {2.0, 0.0, 0.0, 2.0});
    CHECK(e.frozen());
    CHECK(e.utilities(e.id("V"))[0] == 2.0);
    CHECK(d.utilities(d.id("V"))[0] == 1.0);
  }

  TEST_CASE("property: random diagrams freeze into valid orders") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const InfluenceDiagram d = random_diagram(seed);
      const auto order = d.order();
      REQUIRE(order.size() == d.chance_nodes().size() + d.decision_nodes().size());
      std::uint64_t paths = 1;
      for (const NodeId id : order) {
        paths *= d.state_count(id);
        for (const NodeId p : d.parents(id)) CHECK(d.position(p) < d.position(id));
      }
      CHECK(d.path_count() == paths);
      CHECK(paths >= 1);
      for (const NodeId id : d.chance_nodes()) {
        const auto t = d.probabilities(id);
        const std::size_t k = d.state_count(id);
        for (std::size_t r = 0; r < t.size(); r += k) {
          double sum = 0.0;
          for (std::size_t s = 0; s < k; ++s) {
            CHECK(t[r + s] >= 0.0);
            sum += t[r + s];
          }
          CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
      }
      // Same input, same order.
      const InfluenceDiagram again = random_diagram(seed);
      CHECK(std::vector<NodeId>(again.order().begin(), again.order().end()) ==
            std::vector<NodeId>(order.begin(), order.end()));
    }
  }
}
