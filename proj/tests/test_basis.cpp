#include <catch2/catch_amalgamated.hpp>

#include "rydcount/basis.hpp"
#include "rydcount/graph.hpp"
#include "test_util.hpp"

using namespace rydcount;

TEST_CASE("enumerate_solutions lists independent sets in numeric order", "[basis]") {
  const auto chain3 = enumerate_solutions(build_chain(3));
  CHECK(chain3.states == std::vector<std::uint64_t>{0b000, 0b001, 0b010, 0b100, 0b101});

  const auto free3 = enumerate_solutions(make_graph(3, {}));
  CHECK(free3.size() == 8);

  const auto chain18 = enumerate_solutions(build_chain(18));
  CHECK(chain18.size() == testutil::fib(20));
  CHECK(chain18.size() == 6765);
}

TEST_CASE("enumeration matches the brute-force oracle", "[basis]") {
  for (int n = 1; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto g = testutil::random_graph(n, 0.3, 1000 * n + seed);
      const auto basis = enumerate_solutions(g);
      const auto oracle = testutil::bruteforce_solutions(g);
      CHECK(basis.states == oracle);  // same contents, same (ascending) order
    }
  }
}

TEST_CASE("index_of inverts the state list", "[basis]") {
  const auto basis = enumerate_solutions(build_chain(10));
  for (std::size_t i = 0; i < basis.size(); ++i)
    CHECK(basis.index_of(basis.states[i]) == i);
  CHECK_FALSE(basis.index_of(0b11).has_value());
  CHECK(basis.states[0] == 0);  // all-zeros first
}

TEST_CASE("basis cap reports the true size", "[basis]") {
  CHECK_THROWS_AS(enumerate_solutions(build_chain(10), 100), ResourceError);
  CHECK_THROWS_WITH(enumerate_solutions(build_chain(10), 100),
                    Catch::Matchers::ContainsSubstring("144"));
}
