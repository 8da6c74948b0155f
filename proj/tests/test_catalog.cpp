#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "gpattr/error.hpp"
#include "gpattr/io.hpp"

using namespace gpattr;

TEST_CASE("catalog puts the conversion first, customer types before firm types") {
  EventCatalog cat({{"disp_imp", Initiator::Firm, "display"},
                    {"search_imp", Initiator::Customer, "search"},
                    {"conv", Initiator::Customer, std::nullopt},
                    {"disp_click", Initiator::Customer, "display"}},
                   "conv");
  CHECK(cat.num_types() == 4);
  CHECK(cat.num_customer() == 3);
  CHECK(cat.type_name(0) == "conv");
  CHECK(cat.type_name(1) == "search_imp");
  CHECK(cat.type_name(2) == "disp_click");
  CHECK(cat.type_name(3) == "disp_imp");
  CHECK(cat.is_firm(3));
  CHECK_FALSE(cat.channel_of(0).has_value());
  CHECK(cat.channel_names() == std::vector<std::string>{"search", "display"});
  CHECK(cat.channel_types(cat.channel_index("display")) == std::vector<TypeIndex>{2, 3});
}

TEST_CASE("catalog invariants are enforced") {
  using S = EventCatalog::TypeSpec;
  CHECK_THROWS_AS(EventCatalog({S{"conv", Initiator::Customer, std::nullopt}, S{"a", Initiator::Customer, "x"}}, "conv"),
                  InvalidArgument);  // q == p
  CHECK_THROWS_AS(EventCatalog({S{"conv", Initiator::Firm, std::nullopt}, S{"a", Initiator::Firm, "x"}}, "conv"),
                  InvalidArgument);
  CHECK_THROWS_AS(EventCatalog({S{"conv", Initiator::Customer, "x"}, S{"a", Initiator::Firm, "x"}}, "conv"),
                  InvalidArgument);
  CHECK_THROWS_AS(EventCatalog({S{"conv", Initiator::Customer, std::nullopt}, S{"a", Initiator::Firm, std::nullopt}},
                               "conv"),
                  InvalidArgument);
  CHECK_THROWS_AS(EventCatalog({S{"conv", Initiator::Customer, std::nullopt}, S{"a", Initiator::Firm, "x"},
                                S{"a", Initiator::Firm, "x"}},
                               "conv"),
                  InvalidArgument);
  CHECK_THROWS_AS(EventCatalog({S{"c", Initiator::Customer, std::nullopt}, S{"a", Initiator::Firm, "x"}}, "conv"),
                  InvalidArgument);
}

TEST_CASE("load_paths reads the empty and Figure-3 lines") {
  const auto cat = fixtures::figure3_catalog();
  std::istringstream in(
      R"({"path_id":"a","T":90,"events":[]})"
      "\n\n"
      R"({"path_id":"b","T":7,"events":[{"t":1,"e":"search_imp"},{"t":3,"e":"disp_imp"},{"t":6,"e":"search_imp"},{"t":7,"e":"conv"}]})"
      "\n");
  const auto paths = load_paths(in, cat);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].events.empty());
  CHECK_FALSE(paths[0].is_positive());
  CHECK(paths[1] == fixtures::figure3_path());
  CHECK(paths[1].is_positive());
  CHECK(paths[1].conversion_positions() == std::vector<std::size_t>{3});
}

TEST_CASE("unsorted events are sorted, ties and bad events rejected") {
  const auto cat = fixtures::figure3_catalog();
  const auto sorted = path_from_json(Json::parse(R"({"path_id":"s","T":9,"events":[{"t":5,"e":"conv"},{"t":2,"e":"disp_imp"}]})"), cat);
  CHECK(sorted.events[0].t == 2.0);
  CHECK(sorted.events[1].t == 5.0);

  const char* bad[] = {
      R"({"path_id":"d","T":9,"events":[{"t":5,"e":"conv"},{"t":5,"e":"disp_imp"}]})",
      R"({"path_id":"d","T":9,"events":[{"t":10,"e":"conv"}]})",
      R"({"path_id":"d","T":9,"events":[{"t":-1,"e":"conv"}]})",
      R"({"path_id":"d","T":9,"events":[{"t":1,"e":"email"}]})",
      R"({"path_id":"d","T":0,"events":[]})",
      R"({"path_id":"d","events":[]})",
  };
  for (const char* line : bad) {
    CAPTURE(line);
    std::istringstream in(std::string("\n") + line + "\n");
    try {
      load_paths(in, cat);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  std::istringstream broken("{\"path_id\": \n");
  CHECK_THROWS_AS(load_paths(broken, cat), ParseError);
}

TEST_CASE("paths round-trip through JSONL") {
  const auto cat = fixtures::figure3_catalog();
  const std::vector<Path> paths{fixtures::figure3_path(), Path{"e", 3.5, {}}};
  std::ostringstream out;
  write_paths(out, paths, cat);
  std::istringstream in(out.str());
  CHECK(load_paths(in, cat) == paths);
}

TEST_CASE("catalog round-trips through JSON") {
  const auto cat = fixtures::figure3_catalog();
  CHECK(catalog_from_json(catalog_to_json(cat)) == cat);
  CHECK_THROWS_AS(catalog_from_json(Json::parse(R"({"types": 3, "conversion": "conv"})")), ParseError);
}

TEST_CASE("truncate_before is strict and filters by label") {
  const auto path = fixtures::figure3_path();
  const auto all = TypeSet::all(3);
  const auto first3 = truncate_before(path, 7.0, all);
  CHECK(first3.size() == 3);
  CHECK(first3.back().t == 6.0);
  CHECK(truncate_before(path, 0.0, all).empty());
  const auto search = truncate_before(path, 6.0, TypeSet(3, {1}));
  REQUIRE(search.size() == 1);
  CHECK(search[0].t == 1.0);
  for (double t = 0.0; t < 8.0; t += 0.5)
    CHECK(truncate_before(path, t, all).size() <= truncate_before(path, t + 0.5, all).size());
}

TEST_CASE("removal sets are validated against the path") {
  const auto path = fixtures::figure3_path();
  CHECK_NOTHROW(validate_removal(path, RemovalSet({0, 2}, 3)));
  CHECK_THROWS_AS(validate_removal(path, RemovalSet({3}, 3)), InvalidArgument);
  CHECK_THROWS_AS(validate_removal(path, RemovalSet({0}, 2)), InvalidArgument);  // target not a conversion
  Path two{"c", 9.0, {{1.0, 0}, {2.0, 1}, {3.0, 0}}};
  CHECK_THROWS_AS(validate_removal(two, RemovalSet({0}, 2)), InvalidArgument);
  CHECK_NOTHROW(validate_removal(two, RemovalSet({0}, 2), true));

  const auto cat = fixtures::figure3_catalog();
  CHECK(channel_removal_set(path, cat, 3, cat.channel_index("search")).positions == std::vector<std::size_t>{0, 2});
  CHECK(channel_removal_set(path, cat, 3, cat.channel_index("display")).positions == std::vector<std::size_t>{1});
}
