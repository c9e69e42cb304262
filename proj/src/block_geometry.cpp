#include "roughfrac/block_geometry.hpp"

#include <cmath>

#include "roughfrac/errors.hpp"

namespace roughfrac {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
}  // namespace

double block_norm(std::span<const double> ybar, int m, int n) {
  if (static_cast<int>(ybar.size()) != m * n)
    throw DomainError("block_norm: point dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double b2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const double c = ybar[static_cast<std::size_t>(i) * n + d];
      b2 += c * c;
    }
    total += n == 1 ? std::fabs(ybar[i]) : std::sqrt(b2);
  }
  return total;
}

double block_ball_volume(int m, int n) {
  if (m < 1 || n < 1) throw DomainError("block_ball_volume: m,n >= 1");
  const double log_sphere = std::log(2.0) + 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n);
  return std::exp(m * (log_sphere + std::lgamma(static_cast<double>(n))) -
                  std::lgamma(static_cast<double>(m) * n + 1.0));
}

void sample_block_direction(Rng& rng, int m, int n, std::span<double> out) {
  if (m > 16) throw ConfigError("sample_block_direction: m <= 16");
  // Block radii (t_1..t_m): Dirichlet(n,..,n,1) marginal, the law of the
  // normalized radii of a uniform point of the block ball.
  double t[16];
  double sum = rng.exponential();  // the trailing Gamma(1) coordinate
  for (int i = 0; i < m; ++i) {
    t[i] = rng.gamma_int(n);
    sum += t[i];
  }
  for (int i = 0; i < m; ++i) t[i] /= sum;
  double tsum = 0.0;
  for (int i = 0; i < m; ++i) tsum += t[i];

  for (int i = 0; i < m; ++i) {
    const double ti = t[i] / tsum;
    double* block = out.data() + static_cast<std::size_t>(i) * n;
    if (n == 1) {
      block[0] = rng.coin() ? ti : -ti;
    } else if (n == 2) {
      const double a = kTwoPi * rng.uniform();
      block[0] = ti * std::cos(a);
      block[1] = ti * std::sin(a);
    } else {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int d = 0; d < n; ++d) {
          block[d] = rng.normal();
          norm2 += block[d] * block[d];
        }
      } while (norm2 == 0.0);
      const double scale = ti / std::sqrt(norm2);
      for (int d = 0; d < n; ++d) block[d] *= scale;
    }
  }
}

namespace {

// Stick-breaking simplex nodes: midpoint grids in each breaking coordinate,
// weight = prod t_i^{n-1} times the stick-breaking Jacobian.
void simplex_nodes(int m, int n, int k, std::vector<std::vector<double>>& nodes,
                   std::vector<double>& weights) {
  if (m == 1) {
    nodes.push_back({1.0});
    weights.push_back(1.0);
    return;
  }
  std::vector<int> idx(m - 1, 0);
  for (;;) {
    std::vector<double> t(m);
    double remain = 1.0;
    double jac = 1.0;
    for (int j = 0; j < m - 1; ++j) {
      const double xi = (idx[j] + 0.5) / k;
      t[j] = xi * remain;
      jac *= remain;  // diagonal entry d t_j / d xi_j of the triangular map
      remain *= 1.0 - xi;
    }
    t[m - 1] = remain;
    double w = jac;
    if (n > 1)
      for (int i = 0; i < m; ++i) w *= std::pow(t[i], n - 1);
    nodes.push_back(std::move(t));
    weights.push_back(w);
    int j = 0;
    while (j < m - 1 && ++idx[j] == k) idx[j++] = 0;
    if (j == m - 1) break;
  }
}

}  // namespace

DirectionSet make_direction_set(int m, int n, int simplex_nodes_count, int sphere_nodes_count) {
  if (n > 2)
    throw ConfigError(
        "midpoint-tensor directions cover factor dimension n <= 2; use the monte-carlo rule");
  if (simplex_nodes_count < 1 || sphere_nodes_count < 1)
    throw ConfigError("direction set: node counts must be >= 1");

  std::vector<std::vector<double>> tnodes;
  std::vector<double> tweights;
  simplex_nodes(m, n, simplex_nodes_count, tnodes, tweights);

  // Per-factor sphere nodes.
  std::vector<std::vector<double>> sphere;
  if (n == 1) {
    sphere = {{1.0}, {-1.0}};
  } else {
    for (int a = 0; a < sphere_nodes_count; ++a) {
      const double ang = kTwoPi * (a + 0.5) / sphere_nodes_count;
      sphere.push_back({std::cos(ang), std::sin(ang)});
    }
  }

  DirectionSet ds;
  ds.m = m;
  ds.n = n;
  const std::size_t sph = sphere.size();
  std::size_t total = tnodes.size();
  for (int i = 0; i < m; ++i) total *= sph;
  ds.points.reserve(total * static_cast<std::size_t>(m) * n);
  ds.weights.reserve(total);

  std::vector<std::size_t> pick(m, 0);
  for (std::size_t ti = 0; ti < tnodes.size(); ++ti) {
    std::fill(pick.begin(), pick.end(), 0);
    for (;;) {
      for (int i = 0; i < m; ++i) {
        const auto& u = sphere[pick[i]];
        for (int d = 0; d < n; ++d) ds.points.push_back(tnodes[ti][i] * u[d]);
      }
      ds.weights.push_back(tweights[ti]);
      int i = 0;
      while (i < m && ++pick[i] == sph) pick[i++] = 0;
      if (i == m) break;
    }
  }

  double wsum = 0.0;
  for (double w : ds.weights) wsum += w;
  for (double& w : ds.weights) w /= wsum;
  return ds;
}

}  // namespace roughfrac
