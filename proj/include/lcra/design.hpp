#pragma once

#include <vector>

#include "lcra/config.hpp"
#include "lcra/types.hpp"

namespace lcra::design {

// Large-system SIR of the LMMSE receiver at per-device SNR gamma and load
// kappa (active devices per chip):
//   beta = (1 - kappa) gamma / 2 - 1/2
//        + sqrt((1 - kappa)^2 gamma^2 / 4 + (1 + kappa) gamma / 2 + 1/4).
// Equivalently the positive root of beta^2 + beta (1 - gamma + gamma kappa) = gamma.
double beta(double gamma, double kappa);

struct LayerPlan {
  double receive_power = 0.0;     // V_q at the gateway
  double interference_var = 0.0;  // sigma_q^2 = N0 + sum_{l>q} V_l M rho_l
  double snr = 0.0;               // 1 / sigma_q^2
  double load = 0.0;              // kappa_q = rho_q M / N
  double sir = 0.0;               // beta at (snr, load); V_q * sir == gamma_target
  double radius = 0.0;            // outer ring radius, normalized to the cell
  double tx_power = 0.0;          // radius^eta * receive_power
};

struct PowerPlan {
  bool feasible = false;
  int layers = 0;            // Q
  int devices_per_layer = 0; // M
  int spreading_gain = 0;    // N
  double gamma_target = 0.0;
  double noise_power = 0.0;
  double path_loss_exp = 0.0;
  double load = 0.0;  // mean rho * M / N
  std::vector<double> access_prob;  // per layer
  std::vector<LayerPlan> layer;     // empty when infeasible
};

// Receive power levels so every layer decodes at SIR gamma_target under
// successive cancellation; rings of equal area set the transmit powers.
// Infeasible (gamma_target below the single-layer requirement) yields
// feasible == false and no layers.
PowerPlan plan_power_levels(const model::SystemConfig& cfg);

struct LayerAsymptotics {
  double sir = 0.0;           // beta_q
  double snr_product = 0.0;   // V_q beta_q, equals gamma_target by construction
  double fa_threshold = 0.0;  // (1 + beta) ln(1 + V beta) / beta, > 1 when V beta > e - 1
  double md_threshold = 0.0;  // ln(1 + V beta) / (V beta), < 1 when V beta > 0
  double p_fa = 0.0;          // P[chi2_{2T} >= 2 T fa_threshold]
  double p_md = 0.0;          // P[chi2_{2T} <= 2 T md_threshold]
  double md_bound = 0.0;      // exp(-T (1 - md_threshold) / 2), >= p_md
};

struct AsymptoticReport {
  int slot_symbols = 0;  // T
  std::vector<LayerAsymptotics> layer;
};

// Large-system single-flip error exponents for a feasible plan.
AsymptoticReport asymptotic_analysis(const PowerPlan& plan, int slot_symbols);

// Finite-size LMMSE SIR for signature g against active signatures g_active
// and noise power sigma2: gamma g^H (I + gamma G G^H)^{-1} g with
// gamma = 1 / sigma2.
double mmse_sir(const CVector& g, const CMatrix& g_active, double sigma2);

enum class XiConvention { printed, lemma2 };

struct PepReport {
  int support_size = 0;  // B0
  bool fa_possible = false;
  bool md_possible = false;
  double alpha = 0.0;        // g^H R(b)^{-1} g
  double alpha_prime = 0.0;  // g^H R(b')^{-1} g
  double xi = 0.0;
  double d_fa = 0.0;
  double d_md = 0.0;
  double p_fa = 0.0;  // NaN when fa impossible (B0 == M)
  double p_md = 0.0;  // NaN when md impossible (B0 == 0)
};

// Single-flip pairwise MAP error probabilities for a support of size B0 out
// of M devices, T symbols, receive power V and access probability rho.
//   d_fa = T ln(1 + V alpha) + ln((B0 + 1) / (M - B0)) + ln((1 - rho) / rho)
//   d_md = T ln(1 + V alpha') - ln((M - B0 + 1) / B0) - ln(rho / (1 - rho))
//   p_fa = P[chi2_{2T} >= 2 d_fa / xi],  p_md = P[chi2_{2T} <= 2 d_md / (V alpha')]
// xi follows the chosen convention: alpha / (1 + alpha) (printed) or
// V alpha / (1 + V alpha) (the scale of the decision statistic; both agree at
// V = 1). Negative d_fa forces p_fa = 1; negative d_md forces p_md = 0.
PepReport pep_probabilities(int B0, int M, double rho, int T, double V, double alpha,
                            double alpha_prime, XiConvention conv = XiConvention::printed);

}  // namespace lcra::design
