#pragma once

#include <cstddef>
#include <vector>

#include "hilbertcloud/cloud.hpp"

namespace hcl {

/// Dense row-major matrix used for ground costs and couplings.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

/// Ground costs between two clouds; entries finite and >= 0.
using CostMatrix = Matrix;

/// Coupling with uniform marginals: rows sum to 1/n, columns to 1/m (within
/// the solver's feasibility tolerance).
using TransportPlan = Matrix;

/// Solver knobs. The defaults (eps = 0.001, a fixed budget of 175
/// iterations, log domain) are the training configuration the occupancy
/// pipeline assumes. tol <= 0 disables the convergence check so exactly
/// max_iters iterations run.
struct SinkhornParams {
    double epsilon = 0.001;
    int max_iters = 175;
    double tol = 1e-9;
    bool log_domain = true;
};

struct SinkhornPlanResult {
    TransportPlan plan;
    bool converged = false;
    int iters = 0;
    double marginal_violation = 0.0;
};

struct SinkhornDistanceResult {
    double distance = 0.0;        // <P,C> - eps * H(P)
    double transport_cost = 0.0;  // <P,C>
    double entropy = 0.0;         // H(P)
    SinkhornPlanResult solution;
};

/// C[i][j] = ground cost between X.row(i) and Y.row(j).
CostMatrix cost_matrix(const PointCloud& X, const PointCloud& Y,
                       GroundMetric metric = GroundMetric::sq_euclidean);

/// Matrix-scaling iteration for entropic optimal transport under uniform
/// marginals a = 1/n, b = 1/m: u <- a / (K v), v <- b / (K^T u) with
/// K = exp(-C/eps), returning P = diag(u) K diag(v). The default log-domain
/// mode runs the same updates on potentials f = eps log u, g = eps log v,
/// which survives eps = 0.001 on squared-meter costs; the multiplicative
/// mode throws NumericError on underflow and suggests log_domain.
SinkhornPlanResult sinkhorn_plan(const CostMatrix& C, const SinkhornParams& p);

/// Discrete entropy H(P) = -sum_ij P_ij (log P_ij - 1), with 0 log 0 = 0.
/// Throws DomainError on a negative entry.
double entropy(const TransportPlan& P);

/// Frobenius inner product <P, C>.
double inner_product(const Matrix& P, const Matrix& C);

/// max over rows/columns of |sum - uniform marginal|.
double max_marginal_violation(const TransportPlan& P);

/// Entropic transport distance <P*, C> - eps * H(P*).
SinkhornDistanceResult sinkhorn_distance(const PointCloud& X, const PointCloud& Y,
                                         const SinkhornParams& p,
                                         GroundMetric metric = GroundMetric::sq_euclidean);

/// Gradient of the converged transport objective with respect to Y's
/// coordinates, holding the coupling fixed (envelope form): for squared
/// Euclidean costs, grad(y_j) = sum_i P_ij * 2 (y_j - x_i). Requires a
/// converged plan (positive tol met within max_iters), else NumericError.
PointCloud sinkhorn_grad(const PointCloud& X, const PointCloud& Y, const SinkhornParams& p,
                         GroundMetric metric = GroundMetric::sq_euclidean);

/// Unregularized optimal transport between equal-size clouds (n <= 64):
/// minimum-cost perfect matching on the cost matrix via the Hungarian
/// algorithm, divided by n.
double exact_emd(const PointCloud& X, const PointCloud& Y,
                 GroundMetric metric = GroundMetric::sq_euclidean);

}  // namespace hcl
