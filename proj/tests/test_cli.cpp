#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support.hpp"
#include "symlat/io.hpp"

using namespace symlat;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "symlat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string graph_file(const std::string& name) { return testing::fixture("graphs/" + name).string(); }

}  // namespace

TEST_CASE("count") {
  const auto r = run({"count", "--n", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "13155\n");
  CHECK(run({"count", "--n", "5"}).out == "35285640\n");
}

TEST_CASE("classify summary") {
  const auto r = run({"classify", "--n", "3", "--summary", "--format", "text"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("total=", 0) == 0);
  const auto j = Json::parse(run({"classify", "--n", "3", "--summary"}).out);
  CHECK(j.contains("B"));
  CHECK(j.contains("Pi"));
}

TEST_CASE("meet and join of two graph files") {
  const auto m = run({"meet", graph_file("square_a.json"), graph_file("square_b.json")});
  REQUIRE(m.code == 0);
  CHECK(graph_from_json(Json::parse(m.out)) == parse_compact(numeric_labels(4), "1 3|2 4", "12 23 34 14"));
  const auto j = run({"join", graph_file("square_a.json"), graph_file("square_b.json")});
  REQUIRE(j.code == 0);
  CHECK(graph_from_json(Json::parse(j.out)) == parse_compact(numeric_labels(4), "1 3|2|4", "12|13|14|23|34"));
}

TEST_CASE("classify and sup of a single graph") {
  const auto c = Json::parse(run({"classify", graph_file("square_vertex_regular.json")}).out);
  CHECK(c["B"] == false);
  const auto s = run({"sup", "--class", "B", graph_file("square_vertex_regular.json")});
  REQUIRE(s.code == 0);
  CHECK(graph_from_json(Json::parse(s.out)) == parse_compact(numeric_labels(4), "1 4|2 3", "12 34|14|23"));
}

TEST_CASE("fit") {
  if (!std::filesystem::exists(testing::fixture("mathmarks_cov.csv"))) {
    MESSAGE("skipped: fixtures not found");
    return;
  }
  const auto r = run({"fit", "--cov", testing::fixture("mathmarks_cov.csv").string(), "--n", "88",
                      graph_file("mathmarks_reference.json")});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["converged"] == true);
  CHECK(std::abs(j["bic"].get<double>() - 2587.404) < 0.5);
}

TEST_CASE("global options after the subcommand") {
  const auto expected = model_count(3).str();
  const auto text = run({"enumerate", "--n", "3", "--count-only", "--format", "text"});
  CHECK(text.code == 0);
  CHECK(text.out == expected + "\n");
  const auto j = Json::parse(run({"enumerate", "--n", "3", "--count-only", "--format", "json"}).out);
  CHECK(j["class"] == "all");
  CHECK(std::to_string(j["count"].get<long long>()) == expected);
}

TEST_CASE("errors") {
  const auto missing = run({"meet", "no_such_file.json", "other.json"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error: ", 0) == 0);
  const auto guard = run({"enumerate", "--n", "6", "--count-only"});
  CHECK(guard.code == 1);
  CHECK(run({"fit", graph_file("square_a.json")}).code == 1);
  CHECK(run({"frobnicate"}).code != 0);
}
