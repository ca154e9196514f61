#include "symlat/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "symlat/classes.hpp"
#include "symlat/error.hpp"

namespace symlat {
namespace {

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
};

Factor factor(const Eigen::MatrixXd& k) {
  Factor f;
  f.llt.compute(k);
  f.ok = f.llt.info() == Eigen::Success;
  return f;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

std::vector<Eigen::MatrixXd> basis(const ColouredGraph& g) {
  std::vector<Eigen::MatrixXd> out;
  for (auto& t : indicator_matrices(g)) out.push_back(std::move(t.matrix));
  return out;
}

void check_labels(const ColouredGraph& g, const GaussianData& data) {
  if (data.S.rows() != g.order() || data.S.cols() != g.order()) {
    throw GroundMismatch("covariance dimension differs from the number of vertices");
  }
}

Eigen::MatrixXd rcon_from_basis(const std::vector<Eigen::MatrixXd>& t, const Eigen::VectorXd& lambda) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(t.front().rows(), t.front().cols());
  for (std::size_t u = 0; u < t.size(); ++u) k += lambda[static_cast<Eigen::Index>(u)] * t[u];
  return k;
}

// Log-likelihood, or nullopt outside the positive definite cone.
std::optional<double> loglik_at(const Eigen::MatrixXd& k, const GaussianData& data) {
  auto f = factor(k);
  if (!f.ok) return std::nullopt;
  return 0.5 * data.dof() * (log_det(f.llt) - (data.S.cwiseProduct(k)).sum());
}

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_fraction(double a, double x) {
  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

GaussianData GaussianData::aligned_to(const Labels& order) const {
  if (order == labels) return *this;
  std::vector<Eigen::Index> idx;
  for (const auto& l : order) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw GroundMismatch("variable '" + l + "' not present in the data");
    idx.push_back(it - labels.begin());
  }
  if (idx.size() != labels.size()) throw GroundMismatch("graph and data have different variables");
  GaussianData out{order, Eigen::MatrixXd(S.rows(), S.cols()), n, divisor};
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out.S(i, j) = S(idx[i], idx[j]);
  return out;
}

GaussianData data_from_observations(Labels labels, const Eigen::MatrixXd& y, Divisor divisor) {
  if (y.rows() < 2) throw std::invalid_argument("need at least two observations");
  if (static_cast<std::size_t>(y.cols()) != labels.size()) {
    throw std::invalid_argument("observation width differs from the number of labels");
  }
  const Eigen::MatrixXd centred = y.rowwise() - y.colwise().mean();
  const double denom = divisor == Divisor::n ? y.rows() : y.rows() - 1.0;
  return {std::move(labels), (centred.transpose() * centred) / denom, static_cast<int>(y.rows()),
          divisor};
}

GaussianData data_from_covariance(Labels labels, Eigen::MatrixXd s, int n, Divisor divisor) {
  if (n < 2) throw std::invalid_argument("sample size must be at least 2");
  if (s.rows() != s.cols() || static_cast<std::size_t>(s.rows()) != labels.size()) {
    throw std::invalid_argument("covariance must be square with one row per label");
  }
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
  if (divisor == Divisor::n) s *= (n - 1.0) / n;
  return {std::move(labels), std::move(s), n, divisor};
}

Eigen::MatrixXd rcon_matrix(const ColouredGraph& g, const Eigen::VectorXd& lambda) {
  const auto t = basis(g);
  if (static_cast<std::size_t>(lambda.size()) != t.size()) {
    throw std::invalid_argument("lambda has the wrong number of entries");
  }
  return rcon_from_basis(t, lambda);
}

double rcon_loglik(const ColouredGraph& g, const Eigen::VectorXd& lambda, const GaussianData& data) {
  check_labels(g, data);
  auto value = loglik_at(rcon_matrix(g, lambda), data);
  if (!value) throw DomainError("concentration matrix is not positive definite");
  return *value;
}

Eigen::VectorXd rcon_gradient(const ColouredGraph& g, const Eigen::VectorXd& lambda,
                              const GaussianData& data) {
  check_labels(g, data);
  const auto t = basis(g);
  auto f = factor(rcon_from_basis(t, lambda));
  if (!f.ok) throw DomainError("concentration matrix is not positive definite");
  const Eigen::MatrixXd sigma = f.llt.solve(Eigen::MatrixXd::Identity(g.order(), g.order()));
  Eigen::VectorXd grad(static_cast<Eigen::Index>(t.size()));
  for (std::size_t u = 0; u < t.size(); ++u) {
    grad[static_cast<Eigen::Index>(u)] =
        0.5 * data.dof() * (sigma.cwiseProduct(t[u]).sum() - data.S.cwiseProduct(t[u]).sum());
  }
  return grad;
}

Eigen::MatrixXd rcon_hessian(const ColouredGraph& g, const Eigen::VectorXd& lambda,
                             const GaussianData& data) {
  check_labels(g, data);
  const auto t = basis(g);
  auto f = factor(rcon_from_basis(t, lambda));
  if (!f.ok) throw DomainError("concentration matrix is not positive definite");
  const Eigen::MatrixXd sigma = f.llt.solve(Eigen::MatrixXd::Identity(g.order(), g.order()));
  std::vector<Eigen::MatrixXd> st;
  for (const auto& m : t) st.push_back(sigma * m);
  const auto p = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd h(p, p);
  for (Eigen::Index u = 0; u < p; ++u)
    for (Eigen::Index v = u; v < p; ++v)
      h(u, v) = h(v, u) = -0.5 * data.dof() * st[u].cwiseProduct(st[v].transpose()).sum();
  return h;
}

double saturated_loglik(const GaussianData& data) {
  auto f = factor(data.S);
  if (!f.ok) throw MleNonexistence("sample covariance is singular; saturated model has no MLE");
  return 0.5 * data.dof() * (-log_det(f.llt) - static_cast<double>(data.S.rows()));
}

FitResult fit_rcon(const ColouredGraph& g, const GaussianData& raw, const FitOptions& opts) {
  const GaussianData data = raw.aligned_to(g.labels());
  check_labels(g, data);
  const auto t = basis(g);
  const auto p = static_cast<Eigen::Index>(t.size());
  const int d = g.order();
  const auto& vc = g.vertex_classes();

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p);
  for (int b = 0; b < vc.num_blocks(); ++b) {
    double sum = 0;
    int count = 0;
    for (int v = 0; v < d; ++v) {
      if (vc.rgs()[v] != b) continue;
      if (!(data.S(v, v) > 0)) throw MleNonexistence("variable '" + g.labels()[v] + "' has zero variance");
      sum += 1.0 / data.S(v, v);
      ++count;
    }
    lambda[b] = sum / count;
  }

  auto ll = loglik_at(rcon_from_basis(t, lambda), data);
  if (!ll) throw MleNonexistence("no positive definite starting point");
  FitResult r;
  double best_grad = std::numeric_limits<double>::infinity();
  int stall = 0;
  Eigen::VectorXd grad;
  for (r.iterations = 0;; ++r.iterations) {
    grad = rcon_gradient(g, lambda, data);
    r.gradient_norm = grad.cwiseAbs().maxCoeff();
    if (r.gradient_norm < opts.gradient_tolerance) {
      r.converged = true;
      break;
    }
    if (r.iterations >= opts.max_iterations) break;
    if (r.gradient_norm < best_grad) {
      best_grad = r.gradient_norm;
      stall = 0;
    } else if (++stall >= opts.stall_limit) {
      throw MleNonexistence("likelihood keeps increasing towards the boundary of the positive definite cone");
    }
    const Eigen::MatrixXd neg_h = -rcon_hessian(g, lambda, data);
    Eigen::VectorXd step = neg_h.ldlt().solve(grad);
    if (!step.allFinite() || step.dot(grad) <= 0) step = grad;  // fall back to ascent direction
    // Steps may lose up to a few ulps of the objective: near the optimum the
    // Newton gain falls below the resolution of the log-likelihood.
    const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(*ll));
    double scale = 1.0;
    std::optional<double> next;
    for (int h = 0; h <= opts.max_halvings; ++h, scale *= 0.5) {
      next = loglik_at(rcon_from_basis(t, lambda + scale * step), data);
      if (next && *next >= *ll - noise) break;
      next.reset();
    }
    if (!next) break;  // no ascent possible at machine precision
    lambda += scale * step;
    const double change = std::abs(*next - *ll);
    ll = next;
    if (change <= opts.relative_tolerance * std::max(1.0, std::abs(*ll))) {
      const double g_now = rcon_gradient(g, lambda, data).cwiseAbs().maxCoeff();
      if (g_now < std::max(opts.gradient_tolerance, 1e-9 * data.dof())) {
        r.gradient_norm = g_now;
        r.converged = true;
        ++r.iterations;
        break;
      }
    }
  }
  r.lambda = lambda;
  r.K = rcon_from_basis(t, lambda);
  r.loglik = *ll;
  r.p = static_cast<int>(p);
  r.df = d + d * (d - 1) / 2 - r.p;
  r.deviance = 2.0 * (saturated_loglik(data) - r.loglik);
  r.p_value = r.df > 0 ? chisq_sf(std::max(0.0, r.deviance), r.df) : 1.0;
  r.bic = bic(r, data);
  return r;
}

LrtDecision lrt_vs_saturated(const FitResult& fit, double alpha) {
  if (fit.df < 0) throw std::logic_error("negative degrees of freedom");
  LrtDecision out;
  out.deviance = fit.deviance;
  out.df = fit.df;
  out.p_value = fit.df == 0 ? 1.0 : chisq_sf(std::max(0.0, fit.deviance), fit.df);
  out.accept = out.p_value > alpha;
  return out;
}

double gamma_q(double a, double x) {
  if (a <= 0) throw std::invalid_argument("gamma_q needs a > 0");
  if (x < 0) throw std::invalid_argument("gamma_q needs x >= 0");
  if (x == 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chisq_sf(double x, double df) {
  if (x < 0) throw std::invalid_argument("chisq_sf needs x >= 0");
  return gamma_q(0.5 * df, 0.5 * x);
}

double bic(const FitResult& fit, const GaussianData& data) {
  return -2.0 * fit.loglik + fit.p * std::log(static_cast<double>(data.n));
}

Eigen::VectorXd mu_star(const SetPartition& m, const Eigen::MatrixXd& samples) {
  if (samples.rows() == 0) throw std::invalid_argument("mu_star needs at least one observation");
  if (static_cast<std::size_t>(samples.cols()) != m.size()) {
    throw GroundMismatch("partition size differs from the number of variables");
  }
  const Eigen::VectorXd col_sum = samples.colwise().sum().transpose();
  std::vector<double> block_sum(static_cast<std::size_t>(m.num_blocks()), 0.0);
  std::vector<int> block_size(static_cast<std::size_t>(m.num_blocks()), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    block_sum[m.rgs()[i]] += col_sum[static_cast<Eigen::Index>(i)];
    ++block_size[m.rgs()[i]];
  }
  Eigen::VectorXd mu(samples.cols());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int b = m.rgs()[i];
    mu[static_cast<Eigen::Index>(i)] = block_sum[b] / (block_size[b] * static_cast<double>(samples.rows()));
  }
  return mu;
}

RcorMatrix rcor_build_K(const ColouredGraph& g, const RcorParams& params) {
  const auto& vc = g.vertex_classes();
  const auto& ec = g.edge_classes();
  if (params.eta.size() != static_cast<std::size_t>(vc.num_blocks()) ||
      params.tau.size() != static_cast<std::size_t>(ec.num_blocks())) {
    throw std::invalid_argument("RCOR parameter counts do not match the colour classes");
  }
  for (double e : params.eta)
    if (!(e > 0)) throw std::invalid_argument("eta must be positive");
  for (double t : params.tau)
    if (!(t > -1 && t < 1)) throw std::invalid_argument("tau must lie in (-1, 1)");
  const int d = g.order();
  Eigen::VectorXd a(d);
  for (int v = 0; v < d; ++v) a[v] = params.eta[vc.rgs()[v]];
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t i = 0; i < ec.size(); ++i) {
    auto [x, y] = g.endpoints(ec.ground()[i]);
    c(x, y) = c(y, x) = params.tau[ec.rgs()[i]];
  }
  RcorMatrix out{a.asDiagonal() * c * a.asDiagonal(), false};
  out.positive_definite = factor(out.K).ok;
  return out;
}

std::string_view to_string(EquivalenceOutcome o) {
  switch (o) {
    case EquivalenceOutcome::identical: return "identical";
    case EquivalenceOutcome::violation_found: return "violation_found";
    case EquivalenceOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

EquivalenceOutcome check_edge_regular_equivalence(const ColouredGraph& g, int trials,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> diag(1.0, 3.0);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  const auto t = basis(g);
  const int nv = g.vertex_classes().num_blocks();
  const auto& ec = g.edge_classes();
  int drawn = 0;
  for (int attempt = 0; drawn < trials && attempt < 100 * trials; ++attempt) {
    Eigen::VectorXd lambda(static_cast<Eigen::Index>(t.size()));
    for (Eigen::Index u = 0; u < lambda.size(); ++u) lambda[u] = u < nv ? diag(rng) : off(rng);
    const Eigen::MatrixXd k = rcon_from_basis(t, lambda);
    if (!factor(k).ok) continue;
    ++drawn;
    std::vector<std::optional<double>> scaled(static_cast<std::size_t>(ec.num_blocks()));
    for (std::size_t i = 0; i < ec.size(); ++i) {
      auto [a, b] = g.endpoints(ec.ground()[i]);
      const double c = k(a, b) / std::sqrt(k(a, a) * k(b, b));
      auto& slot = scaled[ec.rgs()[i]];
      if (!slot) slot = c;
      else if (std::abs(*slot - c) > 1e-9) return EquivalenceOutcome::violation_found;
    }
  }
  return is_edge_regular(g) ? EquivalenceOutcome::identical : EquivalenceOutcome::inconclusive;
}

}  // namespace symlat
