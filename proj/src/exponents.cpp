#include "roughfrac/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "roughfrac/errors.hpp"

namespace roughfrac {

namespace {

constexpr double kInvTol = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (!(p >= 1.0)) throw DomainError("conjugate_exponent requires p >= 1, got " + fmt(p));
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

ExponentConfig derive_exponents(int m, int n, double alpha, double s,
                                std::vector<double> p_in) {
  if (m < 1 || n < 1) throw HypothesisViolation("m >= 1 and n >= 1");
  const double mn = static_cast<double>(m) * n;
  if (!(alpha > 0.0 && alpha < mn))
    throw HypothesisViolation("0 < alpha < m*n", "alpha = " + fmt(alpha) + ", m*n = " + fmt(mn));
  if (!(s > 1.0)) throw HypothesisViolation("s > 1", "s = " + fmt(s));
  const double s_prime = conjugate_exponent(s);
  if (!(s_prime >= 1.0 && s_prime < mn / alpha))
    throw HypothesisViolation("1 <= s' < m*n/alpha",
                              "s' = " + fmt(s_prime) + ", m*n/alpha = " + fmt(mn / alpha));
  if (static_cast<int>(p_in.size()) != m)
    throw HypothesisViolation("len(p_in) == m",
                              "got " + std::to_string(p_in.size()) + " exponents for m = " +
                                  std::to_string(m));

  double inv_p_out = -alpha / n;
  std::vector<double> q(p_in.size());
  for (std::size_t i = 0; i < p_in.size(); ++i) {
    if (!(p_in[i] >= 1.0))
      throw HypothesisViolation("p_i >= 1", "p_" + std::to_string(i + 1) + " = " + fmt(p_in[i]));
    inv_p_out += 1.0 / p_in[i];
    const double inv_q = 1.0 / p_in[i] - alpha / mn;
    if (!(inv_q > 0.0))
      throw HypothesisViolation("1/q_i = 1/p_i - alpha/(m*n) > 0",
                                "i = " + std::to_string(i + 1) + ", 1/q_i = " + fmt(inv_q));
    q[i] = 1.0 / inv_q;
  }
  if (!(inv_p_out > 0.0))
    throw HypothesisViolation("1/p_out = sum_i 1/p_i - alpha/n > 0",
                              "1/p_out = " + fmt(inv_p_out));

  ExponentConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.alpha = alpha;
  cfg.s = s;
  cfg.s_prime = s_prime;
  cfg.p_in = std::move(p_in);
  cfg.q_per_factor = std::move(q);
  cfg.p_out = 1.0 / inv_p_out;
  return cfg;
}

void validate(const ExponentConfig& cfg) {
  ExponentConfig rebuilt = derive_exponents(cfg.m, cfg.n, cfg.alpha, cfg.s, cfg.p_in);
  const double inv_s = std::isinf(cfg.s) ? 0.0 : 1.0 / cfg.s;
  if (std::fabs(inv_s + 1.0 / cfg.s_prime - 1.0) > kInvTol)
    throw HypothesisViolation("1/s + 1/s' == 1", "s = " + fmt(cfg.s) + ", s' = " + fmt(cfg.s_prime));
  if (std::fabs(1.0 / cfg.p_out - 1.0 / rebuilt.p_out) > kInvTol)
    throw HypothesisViolation("1/p_out = sum_i 1/p_i - alpha/n",
                              "stored p_out = " + fmt(cfg.p_out));
  if (cfg.q_per_factor.size() != rebuilt.q_per_factor.size())
    throw HypothesisViolation("len(q_per_factor) == m");
  for (std::size_t i = 0; i < rebuilt.q_per_factor.size(); ++i)
    if (std::fabs(1.0 / cfg.q_per_factor[i] - 1.0 / rebuilt.q_per_factor[i]) > kInvTol)
      throw HypothesisViolation("1/q_i = 1/p_i - alpha/(m*n)",
                                "i = " + std::to_string(i + 1));
}

double epsilon_bound(const ExponentConfig& cfg) {
  const double mn = cfg.mn();
  return std::min({cfg.alpha, mn / cfg.s_prime - cfg.alpha,
                   static_cast<double>(cfg.n) / cfg.p_out});
}

double default_epsilon(const ExponentConfig& cfg) { return 0.5 * epsilon_bound(cfg); }

namespace {

ProofExponents split_output_exponent(const ExponentConfig& cfg, double eps) {
  const double bound = epsilon_bound(cfg);
  if (!(eps > 0.0 && eps < bound))
    throw HypothesisViolation("0 < eps < min{alpha, m*n/s' - alpha, n/p_out}",
                              "eps = " + fmt(eps) + ", bound = " + fmt(bound));
  ProofExponents pe;
  pe.epsilon = eps;
  const double inv_p = 1.0 / cfg.p_out;
  const double shift = eps / cfg.n;
  pe.q1_eps = 1.0 / (inv_p - shift);
  pe.q2_eps = 1.0 / (inv_p + shift);
  pe.beta1 = pe.q1_eps;
  pe.beta2 = pe.q2_eps;
  return pe;
}

}  // namespace

ProofExponents derive_proof_exponents(const ExponentConfig& cfg, double eps) {
  return split_output_exponent(cfg, eps);
}

ProofExponents derive_proof_exponents_two_weight(const ExponentConfig& cfg, double eps,
                                                 double p) {
  if (!(p > 0.0)) throw HypothesisViolation("p > 0", "p = " + fmt(p));
  ProofExponents pe = split_output_exponent(cfg, eps);
  const double mn = cfg.mn();
  const double mp = cfg.m * p;
  for (std::size_t i = 0; i < cfg.p_in.size(); ++i) {
    const double gap = mn * (1.0 / cfg.p_in[i] - 1.0 / mp);
    if (!(eps < gap))
      throw HypothesisViolation("eps < m*n*(1/p_i - 1/(m p))",
                                "i = " + std::to_string(i + 1) + ", bound = " + fmt(gap));
  }
  if (!(eps < cfg.n / p))
    throw HypothesisViolation("eps < n/p", "n/p = " + fmt(cfg.n / p));
  pe.l1 = 1.0 / (1.0 / p - eps / cfg.n);
  pe.l2 = 1.0 / (1.0 / p + eps / cfg.n);
  const double inv_g = 1.0 / mp - eps / mn;
  const double inv_h = 1.0 / mp + eps / mn;
  pe.g_per_factor.assign(cfg.p_in.size(), 1.0 / inv_g);
  pe.h_per_factor.assign(cfg.p_in.size(), 1.0 / inv_h);
  return pe;
}

}  // namespace roughfrac
