#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symlat/coloured_graph.hpp"
#include "symlat/partition.hpp"

namespace symlat {

/// Divisor used for the sample covariance. The likelihood is scaled by the
/// matching number of degrees of freedom (n-1 or n).
enum class Divisor { n_minus_1, n };

struct GaussianData {
  Labels labels;
  Eigen::MatrixXd S;
  int n = 0;
  Divisor divisor = Divisor::n_minus_1;

  /// Multiplier of the log-likelihood: n-1 or n.
  double dof() const { return divisor == Divisor::n ? n : n - 1.0; }
  /// Same data with rows and columns permuted into `order`.
  GaussianData aligned_to(const Labels& order) const;
};

/// Centres the observations and forms S with the requested divisor.
GaussianData data_from_observations(Labels labels, const Eigen::MatrixXd& y,
                                    Divisor divisor = Divisor::n_minus_1);
/// `s` is a covariance computed with divisor n-1; it is rescaled for Divisor::n.
GaussianData data_from_covariance(Labels labels, Eigen::MatrixXd s, int n,
                                  Divisor divisor = Divisor::n_minus_1);

/// Concentration matrix sum_u lambda_u T^u; lambda lists vertex classes first.
Eigen::MatrixXd rcon_matrix(const ColouredGraph& g, const Eigen::VectorXd& lambda);

/// (dof/2)(log det K - tr(SK)). Throws DomainError if K is not positive definite.
double rcon_loglik(const ColouredGraph& g, const Eigen::VectorXd& lambda, const GaussianData& data);
Eigen::VectorXd rcon_gradient(const ColouredGraph& g, const Eigen::VectorXd& lambda,
                              const GaussianData& data);
Eigen::MatrixXd rcon_hessian(const ColouredGraph& g, const Eigen::VectorXd& lambda,
                             const GaussianData& data);

/// Log-likelihood of the unrestricted model, K = S^-1.
double saturated_loglik(const GaussianData& data);

struct FitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double relative_tolerance = 1e-12;
  int max_halvings = 60;
  int stall_limit = 50;
};

struct FitResult {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd K;
  double loglik = 0;
  int p = 0;
  int df = 0;
  double deviance = 0;
  double p_value = 1;
  double bic = 0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0;
};

/// Maximum likelihood fit by damped Newton ascent. Throws MleNonexistence
/// when no maximiser can be reached inside the positive definite cone.
FitResult fit_rcon(const ColouredGraph& g, const GaussianData& data, const FitOptions& opts = {});

struct LrtDecision {
  double deviance = 0;
  int df = 0;
  double p_value = 1;
  bool accept = true;
};

LrtDecision lrt_vs_saturated(const FitResult& fit, double alpha);

/// Survival function of the chi-square distribution.
double chisq_sf(double x, double df);
/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// -2 loglik + p log n.
double bic(const FitResult& fit, const GaussianData& data);

/// Least-squares mean under equal means within the blocks of m.
/// `samples` has one observation per row.
Eigen::VectorXd mu_star(const SetPartition& m, const Eigen::MatrixXd& samples);

struct RcorParams {
  std::vector<double> eta;  // per vertex class, positive
  std::vector<double> tau;  // per edge class, in (-1, 1)
};

struct RcorMatrix {
  Eigen::MatrixXd K;
  bool positive_definite = false;
};

/// K = A C A with A = sum eta_u T^u and C = I + sum tau_u T^u.
RcorMatrix rcor_build_K(const ColouredGraph& g, const RcorParams& params);

enum class EquivalenceOutcome { identical, violation_found, inconclusive };

std::string_view to_string(EquivalenceOutcome o);

/// Draws random positive definite members of the RCON span and checks that
/// the scaled concentrations are constant on each edge class.
EquivalenceOutcome check_edge_regular_equivalence(const ColouredGraph& g, int trials,
                                                  std::uint64_t seed);

}  // namespace symlat
