#include <doctest.h>

#include <set>

#include "support.hpp"
#include "symlat/error.hpp"

using namespace symlat;
using symlat::testing::all_graphs;
using symlat::testing::sample;

namespace {

const Labels L4 = numeric_labels(4);

ColouredGraph G(std::string_view v, std::string_view e) { return parse_compact(L4, v, e); }

}  // namespace

TEST_CASE("construction and accessors") {
  const auto g = G("1 3|2 4", "12 34|14 23");
  CHECK(g.order() == 4);
  CHECK(g.num_edges() == 4);
  CHECK(g.num_classes() == 4);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(3, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.endpoints(g.edge_id(2, 1)) == std::pair{1, 2});
  CHECK(g.index_of("3") == 2);
  CHECK(to_compact(g) == "1 3 | 2 4 ; 12 34 | 14 23");
  CHECK(parse_compact(L4, "2 4 | 3 1", "41 32 | 43 21") == g);
  CHECK_THROWS(parse_compact(L4, "1 2", ""));
  CHECK_THROWS(parse_compact(L4, "1 2 3 4", "11"));
}

TEST_CASE("zero and unit") {
  const auto z = zero(numeric_labels(2));
  CHECK(z.num_edges() == 0);
  CHECK(z.vertex_classes().num_blocks() == 1);
  const auto u = unit(numeric_labels(3));
  CHECK(u.vertex_classes().num_blocks() == 3);
  CHECK(u.edge_classes().num_blocks() == 3);
  CHECK(cg_leq(zero(L4), unit(L4)));
}

TEST_CASE("partial order examples") {
  const auto g1 = G("1 2|3|4", "12 23");
  const auto g2 = G("1 2|3|4", "12|13 14 34|23");
  const auto g3 = G("1 2|3 4", "12 13 23|14 34");
  CHECK(cg_leq(g1, g2));
  CHECK_FALSE(cg_leq(g1, g3));
  CHECK(cg_leq(g1, g1));
  CHECK_THROWS_AS(cg_leq(g1, zero(numeric_labels(3))), GroundMismatch);
}

TEST_CASE("meet and join example") {
  const auto g4 = G("1 3|2 4", "12 34|14 23");
  const auto g5 = G("1 3|2|4", "12 23|14 34|13");
  CHECK(cg_meet(g4, g5) == G("1 3|2 4", "12 23 34 14"));
  CHECK(cg_join(g4, g5) == G("1 3|2|4", "12|23|34|14|13"));
  for (const auto& g : {g4, g5}) {
    CHECK(cg_meet(g, unit(L4)) == g);
    CHECK(cg_meet(g, zero(L4)) == zero(L4));
    CHECK(cg_join(g, zero(L4)) == g);
  }
}

TEST_CASE("a join can leave the edge regular class") {
  const auto a = G("1 3|2 4", "14 23");
  const auto b = G("1 2|3 4", "14 23");
  CHECK(is_edge_regular(a));
  CHECK(is_edge_regular(b));
  const auto j = cg_join(a, b);
  CHECK(j == G("1|2|3|4", "14 23"));
  CHECK_FALSE(is_edge_regular(j));
}

TEST_CASE("a triple violating distributivity") {
  const auto g6 = G("1 2 4|3", "12 14 24");
  const auto g7 = G("1|2 3 4", "23 24 34");
  const auto g8 = G("1 3|2 4", "12 14 23 34");
  const auto meet78 = cg_meet(g7, g8);
  CHECK(meet78 == zero(L4));
  const auto j67 = cg_join(g6, g7);
  const auto j68 = cg_join(g6, g8);
  CHECK(j67 == j68);
  CHECK(j67 == G("1|2 4|3", "24|12 14|23 34"));
  CHECK(cg_join(g6, meet78) != cg_meet(j67, j68));
}

TEST_CASE("partial order axioms on all of C[3]") {
  const auto& all = all_graphs(3);
  REQUIRE(all.size() == 5 * 15);
  for (const auto& a : all) {
    CHECK(cg_leq(a, a));
    for (const auto& b : all) {
      if (cg_leq(a, b) && cg_leq(b, a)) CHECK(a == b);
      if (!cg_leq(a, b)) continue;
      for (const auto& c : all)
        if (cg_leq(b, c)) CHECK(cg_leq(a, c));
    }
  }
}

TEST_CASE("meet and join are the lattice bounds on C[3]") {
  const auto& all = all_graphs(3);
  for (const auto& a : all) {
    for (const auto& b : all) {
      const auto m = cg_meet(a, b);
      const auto j = cg_join(a, b);
      CHECK(m == cg_meet(b, a));
      CHECK(j == cg_join(b, a));
      const auto inf = testing::greatest(all, [&](const ColouredGraph& x) { return cg_leq(x, a) && cg_leq(x, b); });
      const auto sup = testing::least(all, [&](const ColouredGraph& x) { return cg_leq(a, x) && cg_leq(b, x); });
      REQUIRE(inf);
      REQUIRE(sup);
      CHECK(m == *inf);
      CHECK(j == *sup);
    }
  }
}

TEST_CASE("meet and join are the lattice bounds on sampled pairs of C[4]") {
  const auto& all = all_graphs(4);
  const auto xs = sample(all, 60, 11);
  const auto ys = sample(all, 60, 12);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& a = xs[i];
    const auto& b = ys[i];
    const auto m = cg_meet(a, b);
    const auto j = cg_join(a, b);
    CHECK(cg_leq(m, a));
    CHECK(cg_leq(m, b));
    CHECK(cg_leq(a, j));
    CHECK(cg_leq(b, j));
    for (const auto& x : all) {
      if (cg_leq(x, a) && cg_leq(x, b)) CHECK(cg_leq(x, m));
      if (cg_leq(a, x) && cg_leq(b, x)) CHECK(cg_leq(j, x));
    }
  }
}

TEST_CASE("enumeration") {
  CHECK(enumerate_coloured_graphs(numeric_labels(1)).size() == 1);
  CHECK(enumerate_coloured_graphs(numeric_labels(2)).size() == 4);
  const auto& all = all_graphs(4);
  CHECK(all.size() == 13155);
  CHECK(std::set<ColouredGraph>(all.begin(), all.end()).size() == all.size());
  CHECK_THROWS_AS(ColouredGraphStream(numeric_labels(6)), GuardExceeded);
  CHECK_NOTHROW(ColouredGraphStream(numeric_labels(6), true));
}

TEST_CASE("indicator matrices") {
  const auto single = indicator_matrices(zero(numeric_labels(2)));
  REQUIRE(single.size() == 1);
  CHECK(single[0].matrix.isApprox(Eigen::MatrixXd::Identity(2, 2)));

  const auto edge = indicator_matrices(parse_compact(numeric_labels(2), "1|2", "12"));
  REQUIRE(edge.size() == 3);
  CHECK(edge[2].kind == IndicatorMatrix::Kind::edge);
  CHECK(edge[2].matrix(0, 1) == 1);
  CHECK(edge[2].matrix(1, 0) == 1);
  CHECK(edge[2].matrix.diagonal().isZero());

  const Labels m{"1", "2", "3", "4", "5"};
  const auto reference = parse_compact(m, "1|2 5|3 4", "12|13 14 15 24 35");
  const auto ts = indicator_matrices(reference);
  REQUIRE(ts.size() == 5);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(5, 5);
  for (auto [a, b] : {std::pair{0, 2}, {0, 3}, {0, 4}, {1, 3}, {2, 4}}) big(a, b) = big(b, a) = 1;
  CHECK(ts[4].matrix == big);

  for (const auto& g : sample(all_graphs(4), 50, 3)) {
    Eigen::MatrixXd vsum = Eigen::MatrixXd::Zero(4, 4), esum = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& t : indicator_matrices(g)) (t.kind == IndicatorMatrix::Kind::vertex ? vsum : esum) += t.matrix;
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(4, 4);
    for (auto [a, b] : g.skeleton().edges) adj(a, b) = adj(b, a) = 1;
    CHECK(vsum == Eigen::MatrixXd::Identity(4, 4));
    CHECK(esum == adj);
  }
}

TEST_CASE("text rendering marks composite classes") {
  const auto text = render_text(G("1 3|2|4", "12 23|14 34|13"));
  CHECK(text.find("1*") != std::string::npos);
  CHECK(text.find("3*") != std::string::npos);
  CHECK(text.find("1_3") != std::string::npos);
}
