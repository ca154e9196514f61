#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "symlat/error.hpp"
#include "symlat/gaussian.hpp"
#include "symlat/io.hpp"

using namespace symlat;
using symlat::testing::all_graphs;
using symlat::testing::sample;

namespace {

Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(d, d + 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(rng);
  return a * a.transpose() / (d + 3) + 0.2 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd interior_lambda(const ColouredGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> diag(2.0, 4.0), off(-0.4, 0.4);
  Eigen::VectorXd lambda(g.num_classes());
  const int nv = g.vertex_classes().num_blocks();
  for (int u = 0; u < lambda.size(); ++u) lambda[u] = u < nv ? diag(rng) : off(rng);
  return lambda;
}

ColouredGraph random_graph(int d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> colour(0, 2);
  std::bernoulli_distribution keep(0.6);
  std::vector<int> vg(static_cast<std::size_t>(d)), vl, eg, el;
  std::iota(vg.begin(), vg.end(), 0);
  for (int v = 0; v < d; ++v) vl.push_back(colour(rng));
  for (int e : complete_edge_ids(d))
    if (keep(rng)) {
      eg.push_back(e);
      el.push_back(colour(rng));
    }
  return ColouredGraph(numeric_labels(d), SetPartition::from_labels(vg, vl), SetPartition::from_labels(eg, el));
}

GaussianData simulate(const ColouredGraph& g, const Eigen::VectorXd& lambda, int n, std::mt19937_64& rng) {
  const Eigen::MatrixXd sigma = rcon_matrix(g, lambda).inverse();
  const Eigen::MatrixXd chol = sigma.llt().matrixL();
  std::normal_distribution<double> z;
  Eigen::MatrixXd y(n, g.order());
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e(g.order());
    for (auto& x : e) x = z(rng);
    y.row(i) = (chol * e).transpose();
  }
  return data_from_observations(g.labels(), y);
}

// Equal-class relabelling: the class of each vertex or edge in `h` is the
// image under sigma of its class in `g`.
ColouredGraph relabel(const ColouredGraph& g, const std::vector<int>& sigma) {
  const int d = g.order();
  std::vector<int> vs(static_cast<std::size_t>(d)), vt(static_cast<std::size_t>(d));
  for (int v = 0; v < d; ++v) {
    vs[sigma[v]] = sigma[v];
    vt[sigma[v]] = g.vertex_classes().block_of(v);
  }
  std::vector<int> es, et;
  for (int e : g.edges()) {
    auto [a, b] = g.endpoints(e);
    es.push_back(edge_id(d, sigma[a], sigma[b]));
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < es.size(); ++i) pairs.emplace_back(es[i], g.edge_classes().rgs()[i]);
  std::sort(pairs.begin(), pairs.end());
  for (auto& [e, t] : pairs) {
    (void)e;
    et.push_back(t);
  }
  std::sort(es.begin(), es.end());
  return ColouredGraph(g.shared_labels(), SetPartition::from_labels(vs, vt), SetPartition::from_labels(es, et));
}

}  // namespace

TEST_CASE("log-likelihood closed forms") {
  Eigen::MatrixXd s(1, 1);
  s << 2.5;
  const auto data = data_from_covariance({"1"}, s, 11);
  const auto g = unit(numeric_labels(1));
  Eigen::VectorXd lambda(1);
  lambda << 1 / 2.5;
  CHECK(rcon_loglik(g, lambda, data) == doctest::Approx(5.0 * (-std::log(2.5) - 1)).epsilon(1e-14));

  std::mt19937_64 rng(1);
  const auto d4 = data_from_covariance(numeric_labels(4), random_spd(4, rng), 30);
  const double logdet = std::log(d4.S.determinant());
  CHECK(saturated_loglik(d4) == doctest::Approx(14.5 * (-logdet - 4)).epsilon(1e-12));

  Eigen::VectorXd bad(1);
  bad << -1;
  CHECK_THROWS_AS(rcon_loglik(g, bad, data), DomainError);
}

TEST_CASE("divisor switches the covariance scaling and likelihood weight") {
  Eigen::MatrixXd y(4, 2);
  y << 1, 2, 3, 1, 2, 5, 6, 0;
  const auto a = data_from_observations({"a", "b"}, y, Divisor::n_minus_1);
  const auto b = data_from_observations({"a", "b"}, y, Divisor::n);
  CHECK(a.S(0, 0) == doctest::Approx(14.0 / 3));
  CHECK(b.S(0, 0) == doctest::Approx(14.0 / 4));
  CHECK(a.dof() == 3);
  CHECK(b.dof() == 4);
}

TEST_CASE("fits with closed-form optima") {
  std::mt19937_64 rng(2);
  const auto data = data_from_covariance(numeric_labels(4), random_spd(4, rng), 50);
  const auto sat = fit_rcon(unit(numeric_labels(4)), data);
  CHECK(sat.converged);
  CHECK((sat.K - data.S.inverse()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(sat.deviance == doctest::Approx(0).epsilon(1e-9));
  CHECK(sat.df == 0);
  CHECK(lrt_vs_saturated(sat, 0.05).accept);

  Eigen::MatrixXd s(2, 2);
  s << 1.5, 0.3, 0.3, 2.5;
  const auto two = data_from_covariance({"1", "2"}, s, 20);
  const auto f = fit_rcon(zero(numeric_labels(2)), two);
  CHECK(f.converged);
  CHECK(f.lambda[0] == doctest::Approx(2 / (1.5 + 2.5)).epsilon(1e-10));
  CHECK(f.df == 2);
}

TEST_CASE("BIC") {
  std::mt19937_64 rng(3);
  const auto data = data_from_covariance(numeric_labels(3), random_spd(3, rng), 40);
  const auto g = parse_compact(numeric_labels(3), "1 2|3", "12|13 23");
  const auto f = fit_rcon(g, data);
  CHECK(f.bic == doctest::Approx(-2 * f.loglik + f.p * std::log(40.0)));
  CHECK(bic(f, data) == doctest::Approx(f.bic));
  auto worse = f;
  worse.loglik -= 1;
  CHECK(bic(worse, data) > bic(f, data));
}

TEST_CASE("reference model on the Mathematics marks") {
  const auto path = testing::fixture("mathmarks_cov.csv");
  if (!std::filesystem::exists(path)) {
    MESSAGE("skipped: fixture " << path << " not found");
    return;
  }
  const auto data = read_covariance(path, 88, Divisor::n_minus_1);
  const auto g = read_graph(testing::fixture("graphs/mathmarks_reference.json"));
  const auto f = fit_rcon(g, data);
  CHECK(f.converged);
  CHECK(f.p == 5);
  CHECK(std::abs(f.bic - 2587.404) < 0.5);
}

TEST_CASE("likelihood ratio decisions") {
  FitResult f;
  f.deviance = 3.84;
  f.df = 1;
  const auto d = lrt_vs_saturated(f, 0.05);
  CHECK(d.p_value == doctest::Approx(0.05).epsilon(0.002));
  f.deviance = 1e3;
  f.df = 5;
  CHECK_FALSE(lrt_vs_saturated(f, 0.05).accept);
}

TEST_CASE("analytic gradient and Hessian") {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const auto g = random_graph(2 + t % 4, rng);
    const auto data = data_from_covariance(g.labels(), random_spd(g.order(), rng), 25);
    const auto lambda = interior_lambda(g, rng);
    const auto grad = rcon_gradient(g, lambda, data);
    for (int u = 0; u < lambda.size(); ++u) {
      auto up = lambda, down = lambda;
      up[u] += 1e-5;
      down[u] -= 1e-5;
      const double fd = (rcon_loglik(g, up, data) - rcon_loglik(g, down, data)) / 2e-5;
      CHECK(std::abs(fd - grad[u]) <= 1e-5 * std::max(1.0, std::abs(grad[u])));
    }
    const Eigen::MatrixXd h = rcon_hessian(g, lambda, data);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff() < 0);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("likelihood equations hold at the optimum") {
  std::mt19937_64 rng(6);
  for (const auto& g : sample(all_graphs(4), 40, 61)) {
    const auto data = data_from_covariance(g.labels(), random_spd(4, rng), 60);
    const auto f = fit_rcon(g, data);
    REQUIRE(f.converged);
    CHECK(f.deviance >= -1e-7);
    CHECK((f.K - rcon_matrix(g, f.lambda)).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::MatrixXd sigma = f.K.inverse();
    for (const auto& t : indicator_matrices(g)) {
      const double lhs = (sigma * t.matrix).trace();
      const double rhs = (data.S * t.matrix).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("parameters are recovered from simulated data") {
  std::mt19937_64 rng(7);
  const auto g = parse_compact(numeric_labels(4), "1 3|2 4", "12 34|14 23");
  Eigen::VectorXd truth(4);
  truth << 2.0, 3.0, -0.5, 0.7;
  int within = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = simulate(g, truth, 10000, rng);
    const auto f = fit_rcon(g, data);
    REQUIRE(f.converged);
    const Eigen::MatrixXd cov = (-rcon_hessian(g, f.lambda, data)).inverse();
    bool ok = true;
    for (int u = 0; u < truth.size(); ++u) ok &= std::abs(f.lambda[u] - truth[u]) <= 3 * std::sqrt(cov(u, u));
    within += ok;
  }
  // Four parameters at three standard errors: nearly every replicate lands inside.
  CHECK(within >= 18);
}

TEST_CASE("fits are equivariant under relabelling") {
  std::mt19937_64 rng(8);
  const std::vector<int> sigma{2, 0, 3, 1};
  for (const auto& g : sample(all_graphs(4), 25, 81)) {
    const auto data = data_from_covariance(g.labels(), random_spd(4, rng), 40);
    Eigen::MatrixXd moved(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) moved(sigma[a], sigma[b]) = data.S(a, b);
    const auto data2 = data_from_covariance(g.labels(), moved, 40);
    const auto h = relabel(g, sigma);
    const auto f = fit_rcon(g, data);
    const auto f2 = fit_rcon(h, data2);
    CHECK(f2.bic == doctest::Approx(f.bic).epsilon(1e-9));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(f2.K(sigma[a], sigma[b]) == doctest::Approx(f.K(a, b)).epsilon(1e-7));
  }
}

TEST_CASE("saturated fit on rank-deficient data has no maximiser") {
  Eigen::MatrixXd y(3, 4);
  y << 1, 2, 0, 1, 0, 1, 3, 2, 2, 0, 1, 5;
  const auto data = data_from_observations(numeric_labels(4), y);
  CHECK_THROWS_AS(fit_rcon(unit(numeric_labels(4)), data), MleNonexistence);
}

TEST_CASE("symmetric mean estimator") {
  Eigen::MatrixXd y(3, 3);
  y << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const auto atomic = mu_star(SetPartition::discrete({0, 1, 2}), y);
  CHECK(atomic.isApprox(Eigen::Vector3d(4, 5, 6)));
  const auto constant = mu_star(SetPartition::single_block({0, 1, 2}), Eigen::MatrixXd::Constant(5, 3, 2.5));
  CHECK(constant.isApprox(Eigen::Vector3d::Constant(2.5)));
  Eigen::MatrixXd one(1, 2);
  one << 1, 3;
  CHECK(mu_star(SetPartition::single_block({0, 1}), one).isApprox(Eigen::Vector2d(2, 2)));
  CHECK_THROWS(mu_star(SetPartition::single_block({0, 1}), Eigen::MatrixXd(0, 2)));
}

TEST_CASE("RCOR concentration matrices") {
  const auto diag = rcor_build_K(parse_compact(numeric_labels(3), "1 2|3", "12|13"), {{2.0, 3.0}, {0.0, 0.0}});
  CHECK(diag.K.isApprox(Eigen::Vector3d(4, 4, 9).asDiagonal().toDenseMatrix()));

  const auto pair = rcor_build_K(parse_compact(numeric_labels(2), "1|2", "12"), {{1.0, 1.0}, {0.5}});
  Eigen::Matrix2d expect;
  expect << 1, 0.5, 0.5, 1;
  CHECK(pair.K.isApprox(expect));
  CHECK(pair.positive_definite);

  const Labels frets{"L1", "B1", "L2", "B2"};
  const auto left = parse_compact(frets, "B1 B2|L1 L2", "B1-B2|B1-L1 B2-L2|L1-L2");
  // Vertex classes in block order: {L1,L2} then {B1,B2}; edge classes: {L1B1,L2B2}, {L1L2}, {B1B2}.
  const auto k = rcor_build_K(left, {{1.5, 2.0}, {0.3, 0.2, 0.1}}).K;
  CHECK(k(0, 1) == doctest::Approx(1.5 * 0.3 * 2.0));
  CHECK(k(2, 3) == doctest::Approx(1.5 * 0.3 * 2.0));
  CHECK(k(0, 0) == doctest::Approx(2.25));
  CHECK(k(1, 3) == doctest::Approx(4.0 * 0.1));

  const auto bad = rcor_build_K(parse_compact(numeric_labels(2), "1|2", "12"), {{1.0, 1.0}, {0.99}});
  CHECK(bad.positive_definite);
  const auto tri = rcor_build_K(parse_compact(numeric_labels(3), "1 2 3", "12 13 23"), {{1.0}, {-0.9}});
  CHECK_FALSE(tri.positive_definite);
}

TEST_CASE("RCON and RCOR coincide exactly for edge regular colourings") {
  const Labels l = numeric_labels(4);
  CHECK(check_edge_regular_equivalence(parse_compact(l, "1 3|2 4", "12 14|23 34"), 100, 1) ==
        EquivalenceOutcome::identical);
  CHECK(check_edge_regular_equivalence(parse_compact(l, "1 4|2 3", "12 14 23 34"), 100, 1) ==
        EquivalenceOutcome::violation_found);
  CHECK(check_edge_regular_equivalence(unit(l), 100, 1) == EquivalenceOutcome::identical);
}
