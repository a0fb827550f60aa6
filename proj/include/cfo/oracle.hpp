#pragma once

#include <map>
#include <span>
#include <vector>

#include "cfo/graph.hpp"
#include "cfo/model.hpp"

namespace cfo {

// Row-major dense matrix, sized for the N <= a few hundred problems here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double> operator*(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Cholesky factor L (lower) of a symmetric positive definite matrix. Returns
// false if a pivot is not positive.
bool cholesky(const Matrix& a, Matrix& lower);
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);
// Gaussian elimination with partial pivoting; throws NumericFailure if singular.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

// Stacked measurement model over the non-reference agents (column order =
// g.non_reference_agents()). Reference-incident edges carry r - mu_ref in rhs.
struct LinearSystem {
  std::vector<AgentId> unknowns;
  Matrix design;                // |E| x (N-1), entries 0/1
  std::vector<double> rhs;      // Hz
  std::vector<double> weights;  // 1/sigma2

  Matrix normal_matrix() const;              // A^T W A
  std::vector<double> normal_rhs() const;    // A^T W rhs
};

LinearSystem build_linear_system(const Graph& g, const MeasurementSet& measurements,
                                 double reference_value);

// Centralized weighted least squares. Throws UnobservableSystem naming agents
// not anchored to the reference.
std::map<AgentId, double> wls_solve(const LinearSystem& sys);
// Diagonal of (A^T W A)^{-1}, Hz^2.
std::map<AgentId, double> crlb(const LinearSystem& sys);
double average(const std::map<AgentId, double>& values);

// Mean recursion mu <- eta - K mu with variances frozen at their fixed point.
struct FixedPointSystem {
  std::vector<AgentId> unknowns;      // non-reference agents, ascending
  Matrix K;                           // K(i, j) = weight of neighbour j in row i
  std::vector<double> xi;             // Hz
  std::vector<double> eta;            // xi_i - K_{ref,i} mu_ref, Hz
  std::vector<double> variances;      // P*_i, Hz^2
  double reference_variance = 1e-12;  // 1 / reference_precision

  // C*_{j->i} = sigma2_ij + P*_j
  double message_variance(AgentId j, AgentId i, const MeasurementSet& measurements) const;
  std::vector<double> row_sums() const;
};

// `precisions` are the converged values of variance_map, ordered like
// g.non_reference_agents().
FixedPointSystem build_fixed_point_system(const Graph& g, const MeasurementSet& measurements,
                                          std::span<const double> precisions,
                                          double reference_value,
                                          double reference_precision = 1e12);

// Perron root by power iteration on a non-negative matrix.
double spectral_radius(const Matrix& k, double tol = 1e-10, std::size_t max_iterations = 1000000);

struct MeanFixedPoint {
  std::vector<double> direct;     // (I + K) mu = eta
  std::vector<double> iterated;   // mu <- eta - K mu from zero
  std::size_t iterations = 0;
  double max_gap = 0.0;           // max |direct - iterated|
};

MeanFixedPoint mean_fixed_point(const FixedPointSystem& sys, double tol = 1e-10,
                                std::size_t max_iterations = 10000000);

}  // namespace cfo
