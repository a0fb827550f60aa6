#include "cfo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cfo/errors.hpp"

namespace cfo {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

bool cholesky(const Matrix& a, Matrix& lower) {
  const std::size_t n = a.rows();
  lower = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (a(piv, col) == 0.0) throw NumericFailure("singular matrix in direct solve");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t c = ii + 1; c < n; ++c) s -= a(ii, c) * x[c];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

LinearSystem build_linear_system(const Graph& g, const MeasurementSet& measurements,
                                 double reference_value) {
  LinearSystem sys;
  sys.unknowns = g.non_reference_agents();
  std::map<AgentId, std::size_t> col;
  for (std::size_t k = 0; k < sys.unknowns.size(); ++k) col[sys.unknowns[k]] = k;

  const AgentId ref = g.reference();
  sys.design = Matrix(g.num_edges(), sys.unknowns.size());
  std::size_t row = 0;
  for (const Edge& e : g.edges()) {
    const Measurement& m = measurements.at(e.lo, e.hi);
    double rhs = m.r;
    for (AgentId end : {e.lo, e.hi}) {
      if (end == ref) {
        rhs -= reference_value;
      } else {
        sys.design(row, col.at(end)) = 1.0;
      }
    }
    sys.rhs.push_back(rhs);
    sys.weights.push_back(1.0 / m.sigma2);
    ++row;
  }
  return sys;
}

Matrix LinearSystem::normal_matrix() const {
  const std::size_t n = unknowns.size();
  Matrix out(n, n);
  for (std::size_t r = 0; r < design.rows(); ++r) {
    for (std::size_t a = 0; a < n; ++a) {
      if (design(r, a) == 0.0) continue;
      for (std::size_t b = 0; b < n; ++b) out(a, b) += weights[r] * design(r, a) * design(r, b);
    }
  }
  return out;
}

std::vector<double> LinearSystem::normal_rhs() const {
  std::vector<double> out(unknowns.size(), 0.0);
  for (std::size_t r = 0; r < design.rows(); ++r) {
    for (std::size_t a = 0; a < unknowns.size(); ++a) out[a] += weights[r] * design(r, a) * rhs[r];
  }
  return out;
}

namespace {

// Columns of the design matrix not reachable from a reference-incident row
// through shared rows. Those agents cannot be anchored.
std::vector<AgentId> unanchored(const LinearSystem& sys) {
  const std::size_t n = sys.unknowns.size();
  std::vector<bool> anchored(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t r = 0; r < sys.design.rows(); ++r) {
    std::size_t ones = 0;
    std::size_t last = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (sys.design(r, c) != 0.0) {
        ++ones;
        last = c;
      }
    }
    if (ones == 1 && !anchored[last]) {
      anchored[last] = true;
      stack.push_back(last);
    }
  }
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    for (std::size_t r = 0; r < sys.design.rows(); ++r) {
      if (sys.design(r, c) == 0.0) continue;
      for (std::size_t o = 0; o < n; ++o) {
        if (sys.design(r, o) != 0.0 && !anchored[o]) {
          anchored[o] = true;
          stack.push_back(o);
        }
      }
    }
  }
  std::vector<AgentId> out;
  for (std::size_t c = 0; c < n; ++c) {
    if (!anchored[c]) out.push_back(sys.unknowns[c]);
  }
  return out;
}

Matrix factor_or_throw(const LinearSystem& sys) {
  if (auto bad = unanchored(sys); !bad.empty()) throw UnobservableSystem(std::move(bad));
  Matrix lower;
  if (!cholesky(sys.normal_matrix(), lower)) {
    // Anchored but numerically singular.
    throw UnobservableSystem(sys.unknowns);
  }
  return lower;
}

}  // namespace

std::map<AgentId, double> wls_solve(const LinearSystem& sys) {
  const Matrix lower = factor_or_throw(sys);
  const auto f = cholesky_solve(lower, sys.normal_rhs());
  std::map<AgentId, double> out;
  for (std::size_t k = 0; k < f.size(); ++k) out[sys.unknowns[k]] = f[k];
  return out;
}

std::map<AgentId, double> crlb(const LinearSystem& sys) {
  const Matrix lower = factor_or_throw(sys);
  const std::size_t n = sys.unknowns.size();
  std::map<AgentId, double> out;
  std::vector<double> unit(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    unit[k] = 1.0;
    out[sys.unknowns[k]] = cholesky_solve(lower, unit)[k];
    unit[k] = 0.0;
  }
  return out;
}

double average(const std::map<AgentId, double>& values) {
  if (values.empty()) throw UndefinedMetric("average of an empty set");
  double s = 0.0;
  for (const auto& [id, v] : values) s += v;
  return s / static_cast<double>(values.size());
}

double FixedPointSystem::message_variance(AgentId j, AgentId i,
                                          const MeasurementSet& measurements) const {
  const double sigma2 = measurements.at(i, j).sigma2;
  auto it = std::lower_bound(unknowns.begin(), unknowns.end(), j);
  if (it == unknowns.end() || *it != j) return sigma2 + reference_variance;
  return sigma2 + variances[static_cast<std::size_t>(it - unknowns.begin())];
}

std::vector<double> FixedPointSystem::row_sums() const {
  std::vector<double> out(K.rows(), 0.0);
  for (std::size_t r = 0; r < K.rows(); ++r) {
    for (std::size_t c = 0; c < K.cols(); ++c) out[r] += K(r, c);
  }
  return out;
}

FixedPointSystem build_fixed_point_system(const Graph& g, const MeasurementSet& measurements,
                                          std::span<const double> precisions,
                                          double reference_value, double reference_precision) {
  FixedPointSystem sys;
  sys.unknowns = g.non_reference_agents();
  const std::size_t n = sys.unknowns.size();
  if (precisions.size() != n) throw InvalidArgument("precision vector size mismatch");
  sys.reference_variance = 1.0 / reference_precision;
  sys.variances.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    sys.variances[k] = precisions[k] > 0.0 ? 1.0 / precisions[k]
                                           : std::numeric_limits<double>::infinity();
  }
  std::map<AgentId, std::size_t> col;
  for (std::size_t k = 0; k < n; ++k) col[sys.unknowns[k]] = k;

  const AgentId ref = g.reference();
  sys.K = Matrix(n, n);
  sys.xi.assign(n, 0.0);
  sys.eta.assign(n, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    const AgentId i = sys.unknowns[row];
    double total = 0.0;
    for (AgentId j : g.neighbors(i)) total += 1.0 / sys.message_variance(j, i, measurements);
    if (total == 0.0) continue;
    double xi = 0.0;
    double ref_weight = 0.0;
    for (AgentId j : g.neighbors(i)) {
      const double w = (1.0 / sys.message_variance(j, i, measurements)) / total;
      xi += w * measurements.at(i, j).r;
      if (j == ref) {
        ref_weight = w;
      } else {
        sys.K(row, col.at(j)) = w;
      }
    }
    sys.xi[row] = xi;
    sys.eta[row] = xi - ref_weight * reference_value;
  }
  return sys;
}

namespace {

// Strongly connected components of the pattern k(r, c) > 0 (Kosaraju).
std::vector<std::vector<std::size_t>> strong_components(const Matrix& k) {
  const std::size_t n = k.rows();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      while (next < n && (seen[next] || k(v, next) <= 0.0)) ++next;
      if (next == n) {
        order.push_back(v);
        stack.pop_back();
      } else {
        seen[next] = 1;
        stack.push_back({next, 0});
      }
    }
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> placed(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (placed[*it]) continue;
    std::vector<std::size_t> comp{*it};
    placed[*it] = 1;
    for (std::size_t q = 0; q < comp.size(); ++q) {
      for (std::size_t u = 0; u < n; ++u) {
        if (!placed[u] && k(u, comp[q]) > 0.0) {
          placed[u] = 1;
          comp.push_back(u);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Perron root of an irreducible block by power iteration on K + I: same
// Perron vector, shifted root, and the shift removes the period that a
// bipartite pattern would otherwise cause.
double irreducible_radius(const Matrix& k, double tol, std::size_t max_iterations) {
  const std::size_t n = k.rows();
  Matrix shifted = k;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += 1.0;
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < max_iterations; ++it) {
    auto w = shifted * v;
    double norm = 0.0;
    for (double x : w) norm += x;  // entries stay non-negative
    for (double& x : w) x /= norm;
    // Collatz-Wielandt bounds bracket the Perron root of K + I.
    const auto kw = shifted * w;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, kw[i] / w[i]);
      hi = std::max(hi, kw[i] / w[i]);
    }
    if (hi - lo <= tol) return std::max(0.5 * (lo + hi) - 1.0, 0.0);
    v = std::move(w);
  }
  throw NumericFailure("power iteration exceeded " + std::to_string(max_iterations) +
                       " iterations");
}

}  // namespace

double spectral_radius(const Matrix& k, double tol, std::size_t max_iterations) {
  const std::size_t n = k.rows();
  if (n != k.cols()) throw InvalidArgument("spectral_radius needs a square matrix");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (k(r, c) < 0.0) throw InvalidArgument("spectral_radius expects a non-negative matrix");
    }
  }
  // The spectrum of a reducible matrix is the union of its diagonal blocks'.
  double rho = 0.0;
  for (const auto& comp : strong_components(k)) {
    if (comp.size() == 1 && k(comp[0], comp[0]) <= 0.0) continue;
    Matrix block(comp.size(), comp.size());
    for (std::size_t r = 0; r < comp.size(); ++r)
      for (std::size_t c = 0; c < comp.size(); ++c) block(r, c) = k(comp[r], comp[c]);
    rho = std::max(rho, irreducible_radius(block, tol, max_iterations));
  }
  return rho;
}

MeanFixedPoint mean_fixed_point(const FixedPointSystem& sys, double tol,
                                std::size_t max_iterations) {
  const std::size_t n = sys.unknowns.size();
  MeanFixedPoint out;
  Matrix lhs = sys.K;
  for (std::size_t i = 0; i < n; ++i) lhs(i, i) += 1.0;
  out.direct = lu_solve(std::move(lhs), sys.eta);

  std::vector<double> mu(n, 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const auto kmu = sys.K * mu;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = sys.eta[i] - kmu[i];
      delta = std::max(delta, std::abs(next - mu[i]));
      mu[i] = next;
    }
    out.iterations = it + 1;
    if (delta <= tol) break;
    if (it + 1 == max_iterations) {
      throw NumericFailure("mean recursion did not settle within " +
                           std::to_string(max_iterations) + " iterations");
    }
  }
  out.iterated = std::move(mu);
  for (std::size_t i = 0; i < n; ++i) {
    out.max_gap = std::max(out.max_gap, std::abs(out.direct[i] - out.iterated[i]));
  }
  return out;
}

}  // namespace cfo
