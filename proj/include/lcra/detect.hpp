#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcra/design.hpp"
#include "lcra/model.hpp"
#include "lcra/rng.hpp"
#include "lcra/types.hpp"

namespace lcra::detect {

// R(b) = sigma2 I + V G diag(w) G^H for activity weights w in [0, 1]^M.
CMatrix model_covariance(const CMatrix& codes, const RVector& weights, double V, double sigma2);

// Unnormalized log posterior of the activity vector b under iid Bernoulli(rho)
// priors and CN(0, V) symbols:
//   -T ln det R(b) - sum_t y_t^H R(b)^{-1} y_t + B0 ln rho + (M - B0) ln(1 - rho).
double log_ap(const CMatrix& y, const CMatrix& codes, const std::vector<std::uint8_t>& b,
              double V, double sigma2, double rho);

// Exhaustive MAP search over all 2^M supports; M <= 16. Ties resolve to the
// lexicographically smallest activity vector.
std::vector<std::uint8_t> map_bruteforce(const CMatrix& y, const CMatrix& codes, double V,
                                         double sigma2, double rho);

struct PosteriorState {
  RVector beliefs;         // per-device activity probabilities
  int sweeps = 0;          // sweeps executed
  double last_delta = 0.0; // max |belief change| in the final sweep
};

// Coordinate-ascent variational posterior. Beliefs start at rho; each sweep
// visits every device once (in sweep_order if given, else 0..M-1), replacing
// belief m by the exact posterior of device m with the others marginalized
// under the current factorized beliefs. The N x N model covariance inverse is
// maintained by rank-one updates and refactorized once per sweep, so a sweep
// costs O(M (N^2 + N T)).
PosteriorState cavi_detect(const CMatrix& y, const CMatrix& codes, double V, double sigma2,
                           double rho, int n_sweeps, std::span<const int> sweep_order = {});

// Indices of the top_count largest beliefs, ties to the lower index,
// returned in ascending index order.
std::vector<int> select_top_b(const RVector& beliefs, int top_count);

// LMMSE estimate of the effective symbols of the detected devices:
//   S_hat = V G_d^H (V G_d G_d^H + sigma2 I)^{-1} Y.
CMatrix lmmse_reconstruct(const CMatrix& y, const CMatrix& codes_detected, double V,
                          double sigma2);

enum class DetectorKind { cavi, map };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::cavi;
  int cavi_sweeps = 5;
};

// Parses "cavi:<sweeps>" (or "cavi") and "map".
DetectorSpec parse_detector(const std::string& s);

enum class CancellationMode {
  lmmse,  // subtract the LMMSE reconstruction of the detected devices
  oracle  // subtract the true layer contribution (for diagnostics)
};

struct LayerDetection {
  std::vector<int> detected;
  int md_count = 0;
  int fa_count = 0;
  RVector beliefs;
  double residual_energy = 0.0;  // squared norm after this layer's cancellation
  CMatrix residual;              // receive matrix after this layer's cancellation
};

struct DetectionReport {
  std::vector<LayerDetection> layer;
  int total_md = 0;
  int total_fa = 0;
};

// Layered detection with successive cancellation, strongest layer first.
// Layer q runs the detector on the current residual with that layer's planned
// power, interference variance and access probability. With known_b the true
// per-layer activity count selects the top beliefs (misses == false alarms);
// otherwise beliefs threshold at 1/2.
DetectionReport sic_pipeline(const model::SlotRealization& slot,
                             const model::SpreadingEnsemble& ens,
                             const design::PowerPlan& plan, const DetectorSpec& detector,
                             bool known_b, CancellationMode cancellation = CancellationMode::lmmse);

struct PepEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int n_trials = 0;
  int error_count = 0;
  double alpha = 0.0;        // g^H R(b)^{-1} g at the flipped signature
  double alpha_prime = 0.0;  // g^H R(b')^{-1} g
  double ks_statistic = 0.0;
  bool ks_pass_1pct = false;
  bool fa_direction = false;
};

// Monte Carlo probability that the MAP rule prefers the support with device
// flip_index flipped over the true support. Also runs a Kolmogorov-Smirnov
// check (1% level) of the decision statistic against its predicted
// chi-squared law.
PepEstimate empirical_pep(const CMatrix& codes, const std::vector<std::uint8_t>& b_true,
                          int flip_index, double V, double sigma2, double rho, int T,
                          int n_trials, RandomStream& rng);

}  // namespace lcra::detect
