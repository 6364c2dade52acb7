#include "lcra/design.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lcra/stats.hpp"

namespace lcra::design {

double beta(double gamma, double kappa) {
  if (!(gamma > 0.0)) throw std::invalid_argument("beta: gamma must be positive");
  if (!(kappa >= 0.0)) throw std::invalid_argument("beta: kappa must be non-negative");
  if (kappa == 0.0) return gamma;  // interference-free limit, kept exact
  const double a = (1.0 - kappa) * gamma;
  return 0.5 * a - 0.5 + std::sqrt(0.25 * a * a + 0.5 * (1.0 + kappa) * gamma + 0.25);
}

PowerPlan plan_power_levels(const model::SystemConfig& cfg) {
  cfg.validate();
  const int q_count = cfg.layer_count;
  const int m = cfg.devices_per_layer();
  const int n = cfg.spreading_gain;

  PowerPlan plan;
  plan.layers = q_count;
  plan.devices_per_layer = m;
  plan.spreading_gain = n;
  plan.gamma_target = cfg.target_snr;
  plan.noise_power = cfg.noise_power;
  plan.path_loss_exp = cfg.path_loss_exp;
  plan.access_prob = cfg.access_prob;
  const double mean_rho =
      std::accumulate(cfg.access_prob.begin(), cfg.access_prob.end(), 0.0) / q_count;
  plan.load = mean_rho * m / n;

  // The innermost recursion step sees noise only; the target must at least
  // meet that layer's large-system SIR at unit power.
  const double kappa_last = cfg.access_prob[q_count - 1] * m / n;
  plan.feasible = cfg.target_snr >= beta(1.0 / cfg.noise_power, kappa_last);
  if (!plan.feasible) return plan;

  plan.layer.resize(q_count);
  double interference = 0.0;  // sum over already-planned (higher-index) layers
  for (int q = q_count - 1; q >= 0; --q) {
    LayerPlan& lp = plan.layer[q];
    lp.interference_var = cfg.noise_power + interference;
    lp.snr = 1.0 / lp.interference_var;
    lp.load = cfg.access_prob[q] * m / n;
    lp.sir = beta(lp.snr, lp.load);
    lp.receive_power = cfg.target_snr / lp.sir;
    lp.radius = std::sqrt((q + 1.0) / q_count);  // equal-area rings
    lp.tx_power = std::pow(lp.radius, cfg.path_loss_exp) * lp.receive_power;
    interference += lp.receive_power * m * cfg.access_prob[q];
  }
  return plan;
}

AsymptoticReport asymptotic_analysis(const PowerPlan& plan, int slot_symbols) {
  if (!plan.feasible) throw std::invalid_argument("asymptotic_analysis: plan is infeasible");
  if (slot_symbols < 1) throw std::invalid_argument("asymptotic_analysis: T must be >= 1");

  AsymptoticReport rep;
  rep.slot_symbols = slot_symbols;
  rep.layer.resize(plan.layer.size());
  const int t = slot_symbols;
  for (std::size_t q = 0; q < plan.layer.size(); ++q) {
    const LayerPlan& lp = plan.layer[q];
    LayerAsymptotics& la = rep.layer[q];
    la.sir = lp.sir;
    la.snr_product = lp.receive_power * lp.sir;
    const double vb = la.snr_product;
    la.fa_threshold = (1.0 + lp.sir) * std::log1p(vb) / lp.sir;
    la.md_threshold = std::log1p(vb) / vb;
    la.p_fa = 1.0 - stats::chi2_cdf(2 * t, 2.0 * t * la.fa_threshold);
    la.p_md = stats::chi2_cdf(2 * t, 2.0 * t * la.md_threshold);
    la.md_bound = la.md_threshold < 1.0 ? stats::md_tail_bound(t, la.md_threshold) : 1.0;
  }
  return rep;
}

double mmse_sir(const CVector& g, const CMatrix& g_active, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("mmse_sir: sigma2 must be positive");
  if (g_active.cols() > 0 && g_active.rows() != g.rows())
    throw std::invalid_argument("mmse_sir: dimension mismatch");
  const double gamma = 1.0 / sigma2;
  if (g_active.cols() == 0) return gamma * g.squaredNorm();
  const Eigen::Index n = g.rows();
  CMatrix a = CMatrix::Identity(n, n);
  a.selfadjointView<Eigen::Lower>().rankUpdate(g_active, gamma);
  const CVector x = CMatrix(a.selfadjointView<Eigen::Lower>()).llt().solve(g);
  return gamma * g.dot(x).real();
}

PepReport pep_probabilities(int B0, int M, double rho, int T, double V, double alpha,
                            double alpha_prime, XiConvention conv) {
  if (M < 1) throw std::invalid_argument("pep_probabilities: M must be >= 1");
  if (B0 < 0 || B0 > M) throw std::invalid_argument("pep_probabilities: B0 must lie in [0, M]");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("pep_probabilities: rho must lie in (0, 1)");
  if (T < 1) throw std::invalid_argument("pep_probabilities: T must be >= 1");
  if (!(V > 0.0)) throw std::invalid_argument("pep_probabilities: V must be positive");
  if (!(alpha > 0.0) || !(alpha_prime > 0.0))
    throw std::invalid_argument("pep_probabilities: alpha values must be positive");

  PepReport rep;
  rep.support_size = B0;
  rep.fa_possible = B0 < M;
  rep.md_possible = B0 > 0;
  rep.alpha = alpha;
  rep.alpha_prime = alpha_prime;
  rep.xi = conv == XiConvention::printed ? alpha / (1.0 + alpha)
                                         : V * alpha / (1.0 + V * alpha);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double prior_odds = std::log((1.0 - rho) / rho);

  if (rep.fa_possible) {
    rep.d_fa = T * std::log1p(V * alpha) + std::log((B0 + 1.0) / (M - B0)) + prior_odds;
    // The false-alarm statistic is non-negative, so a negative margin is
    // always exceeded.
    rep.p_fa = rep.d_fa <= 0.0 ? 1.0 : 1.0 - stats::chi2_cdf(2 * T, 2.0 * rep.d_fa / rep.xi);
  } else {
    rep.d_fa = nan;
    rep.p_fa = nan;
  }
  if (rep.md_possible) {
    rep.d_md = T * std::log1p(V * alpha_prime) - std::log((M - B0 + 1.0) / B0) + prior_odds;
    // The missed-detection statistic is non-positive scaled chi-squared; a
    // negative margin can never be undercut.
    rep.p_md = rep.d_md <= 0.0
                   ? 0.0
                   : stats::chi2_cdf(2 * T, 2.0 * rep.d_md / (V * alpha_prime));
  } else {
    rep.d_md = nan;
    rep.p_md = nan;
  }
  return rep;
}

}  // namespace lcra::design
