#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "permanental/mmatrix.hpp"

namespace perm {

/// sigma^2_ij = K_ii + K_jj - K_ij - K_ji and its off-diagonal minimum.
struct SigmaMatrix {
  Matrix sigma2;
  double sigma_star2 = 0;
  int argmin_i = -1, argmin_j = -1;
  bool negative_square = false;  // some sigma^2_ij < -1e-12
};

SigmaMatrix sigma_matrix(const Matrix& k);

struct RowBounds {
  Vector diagonal;  // A_ii, or r_i A_ii for the scaled bound
  Vector bound;
  bool holds = true;
};

/// A_ii <= 1 / (K_ii - max_{j != i} K_ji), for positive row sums and strict column maxima.
RowBounds diag_bound_simple(const MMatrixPair& pair);

struct SigmaBound {
  double bound = 0;      // 2 / ((1 - C) sigma*^2)
  double c = 0;          // constant used
  double minimal_c = 0;  // smallest feasible constant
  double sigma_star2 = 0;
  Vector diagonal;
  bool holds = true;
};

/// A_ii <= 2 / ((1 - C) sigma*^2) for constant-diagonal K with |K_ij - K_ji| <= C sigma^2_ij.
/// A negative `c` selects the minimal feasible constant.
SigmaBound diag_bound_sigma(const MMatrixPair& pair, double c = -1);

struct ScaledBound {
  double k_hat = 0;
  Vector r;
  double c = 0;
  double sigma_hat_star2 = 0;
  double bound = 0;
  RowBounds rows;  // r_i A_ii against the common bound
};

/// r_i A_ii <= 2 / ((1 - C) sigma_hat*^2) with r_i = K_ii / K_hat.
ScaledBound diag_bound_scaled(const MMatrixPair& pair, double k_hat);

enum class AsymmetryVariant { Plain, Normalized };

/// Smallest C with |K_ij - K_ji| <= C sigma^2_ij (Plain) or
/// |K_ij/K_jj - K_ji/K_ii| <= C (2 - K_ij/K_jj - K_ji/K_ii) (Normalized).
double asymmetry_constant(const Matrix& k, AsymmetryVariant variant = AsymmetryVariant::Plain);

struct PointConfig {
  std::vector<double> points;
  Matrix kernel_values;  // u(t_i, t_j)
};

PointConfig make_config(const std::vector<double>& points, const std::function<double(double, double)>& kernel);

/// a*_{[n/p]}: the [n/p]-th smallest diagonal entry of A = K^{-1}.
double psi_star(const PointConfig& config, int p);

struct UnboundednessRow {
  double delta = 0;
  long n = 0;
  double psi_star = 0;
  double log_n_over_psi = 0;
  double sigma_star2 = 0;
  double sigma_star2_log_n = 0;
  std::string error;  // empty when the row is valid
};

/// log n / a*_{[n/p]} and (sigma*_n)^2 log n on the points t_j = j delta / n.
std::vector<UnboundednessRow> unboundedness_statistic(const std::function<double(double, double)>& kernel,
                                                      const std::vector<double>& deltas,
                                                      const std::vector<long>& n_grid, int p);

struct SudakovReport {
  double max_a = 0;
  double two_over_sigma2 = 0;
  double sigma_star2 = 0;
  double expected_max_abs = 0;  // E max_i |zeta_i|, zeta iid N(0,1)
  double expected_max = 0;      // E max_i zeta_i
  double permanental_lower = 0; // (max_i sqrt(a_i))^{-1} E max |zeta|
  double sudakov_lower = 0;     // sigma* / sqrt 2 E max zeta
  double quadrature_error = 0;
  std::string stronger;         // "permanental", "sudakov" or "tie"
};

SudakovReport sudakov_compare(const MMatrixPair& pair);

/// E max of n iid standard normals, with or without absolute values.
double expected_max_normal(long n, bool absolute, double* error = nullptr);

}  // namespace perm
