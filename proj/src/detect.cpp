#include "lcra/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lcra/stats.hpp"

namespace lcra::detect {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln det R and the quadratic form sum_t y_t^H R^{-1} y_t via one Cholesky.
struct CovFactor {
  Eigen::LLT<CMatrix> llt;
  double log_det = 0.0;

  CovFactor(const CMatrix& codes_active, double V, double sigma2, Eigen::Index n) {
    CMatrix r = sigma2 * CMatrix::Identity(n, n);
    if (codes_active.cols() > 0)
      r.selfadjointView<Eigen::Lower>().rankUpdate(codes_active, V);
    llt.compute(r);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("covariance factorization failed");
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i).real());
  }

  double quad(const CMatrix& y) const { return llt.matrixL().solve(y).squaredNorm(); }
};

CMatrix gather_columns(const CMatrix& codes, const std::vector<std::uint8_t>& mask) {
  Eigen::Index count = 0;
  for (auto b : mask) count += b ? 1 : 0;
  CMatrix out(codes.rows(), count);
  Eigen::Index j = 0;
  for (std::size_t m = 0; m < mask.size(); ++m)
    if (mask[m]) out.col(j++) = codes.col(static_cast<Eigen::Index>(m));
  return out;
}

CMatrix gather_columns(const CMatrix& codes, const std::vector<int>& idx) {
  CMatrix out(codes.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = codes.col(idx[j]);
  return out;
}

double prior_log_mass(int active, int total, double rho) {
  double v = 0.0;
  if (active > 0) v += active * std::log(rho);
  if (total - active > 0) v += (total - active) * std::log1p(-rho);
  return v;
}

bool lex_less(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

CMatrix model_covariance(const CMatrix& codes, const RVector& weights, double V, double sigma2) {
  if (weights.size() != codes.cols())
    throw std::invalid_argument("model_covariance: weight count mismatch");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("model_covariance: sigma2 must be positive");
  const Eigen::Index n = codes.rows();
  CMatrix r = sigma2 * CMatrix::Identity(n, n);
  if (codes.cols() > 0)
    r.noalias() += V * codes * weights.asDiagonal() * codes.adjoint();
  return r;
}

double log_ap(const CMatrix& y, const CMatrix& codes, const std::vector<std::uint8_t>& b,
              double V, double sigma2, double rho) {
  if (b.size() != static_cast<std::size_t>(codes.cols()))
    throw std::invalid_argument("log_ap: activity size mismatch");
  if (y.rows() != codes.rows()) throw std::invalid_argument("log_ap: dimension mismatch");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("log_ap: rho must lie in [0, 1]");
  const int active = static_cast<int>(std::count(b.begin(), b.end(), std::uint8_t{1}));
  const int total = static_cast<int>(b.size());
  const CovFactor f(gather_columns(codes, b), V, sigma2, y.rows());
  return -static_cast<double>(y.cols()) * f.log_det - f.quad(y) + prior_log_mass(active, total, rho);
}

std::vector<std::uint8_t> map_bruteforce(const CMatrix& y, const CMatrix& codes, double V,
                                         double sigma2, double rho) {
  const int m = static_cast<int>(codes.cols());
  if (m > 16) throw std::invalid_argument("map_bruteforce: more than 16 devices");
  std::vector<std::uint8_t> best(m, 0), cand(m, 0);
  double best_score = log_ap(y, codes, best, V, sigma2, rho);
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    for (int i = 0; i < m; ++i) cand[i] = (mask >> i) & 1u;
    const double score = log_ap(y, codes, cand, V, sigma2, rho);
    if (score > best_score || (score == best_score && lex_less(cand, best))) {
      best_score = score;
      best = cand;
    }
  }
  return best;
}

PosteriorState cavi_detect(const CMatrix& y, const CMatrix& codes, double V, double sigma2,
                           double rho, int n_sweeps, std::span<const int> sweep_order) {
  const Eigen::Index n = codes.rows();
  const Eigen::Index m = codes.cols();
  const Eigen::Index t = y.cols();
  if (y.rows() != n) throw std::invalid_argument("cavi_detect: dimension mismatch");
  if (n_sweeps < 0) throw std::invalid_argument("cavi_detect: n_sweeps must be >= 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("cavi_detect: rho must lie in [0, 1]");
  if (!sweep_order.empty() && sweep_order.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("cavi_detect: sweep_order must cover every device once");

  PosteriorState state;
  state.beliefs = RVector::Constant(m, rho);
  const double prior_odds = std::log(rho) - std::log1p(-rho);

  std::vector<int> order(m);
  if (sweep_order.empty())
    std::iota(order.begin(), order.end(), 0);
  else
    order.assign(sweep_order.begin(), sweep_order.end());

  CMatrix p(n, n);
  CVector w(n);
  for (int sweep = 0; sweep < n_sweeps; ++sweep) {
    // Fresh factorization once per sweep bounds the drift of the incremental
    // rank-one updates below.
    CMatrix r = sigma2 * CMatrix::Identity(n, n);
    for (Eigen::Index dev = 0; dev < m; ++dev)
      r.selfadjointView<Eigen::Lower>().rankUpdate(codes.col(dev), V * state.beliefs[dev]);
    p = CMatrix(r.selfadjointView<Eigen::Lower>()).llt().solve(CMatrix::Identity(n, n));

    double max_delta = 0.0;
    for (int dev : order) {
      const auto g = codes.col(dev);
      w.noalias() = p.selfadjointView<Eigen::Lower>() * g;
      const double a = g.dot(w).real();
      const double c = V * state.beliefs[dev];
      // Remove device dev from the cached inverse: with R_- = R - c g g^H,
      // R_-^{-1} g = w / denom and g^H R_-^{-1} g = a / denom.
      const double denom = 1.0 - c * a;
      const double alpha = a / denom;
      const double z = (y.adjoint() * w).squaredNorm() / (denom * denom);
      const double lambda =
          prior_odds - t * std::log1p(V * alpha) + (V / (1.0 + V * alpha)) * z;
      const double q_new = logistic(lambda);
      // Fold removal of the old belief and insertion of the new one into a
      // single rank-one update of the inverse (both act along w).
      const double c_new = V * q_new;
      const double k = c / denom - c_new / (denom * (denom + c_new * a));
      if (k != 0.0) p.selfadjointView<Eigen::Lower>().rankUpdate(w, k);
      max_delta = std::max(max_delta, std::abs(q_new - state.beliefs[dev]));
      state.beliefs[dev] = q_new;
    }
    state.last_delta = max_delta;
    ++state.sweeps;
  }
  return state;
}

std::vector<int> select_top_b(const RVector& beliefs, int top_count) {
  const int m = static_cast<int>(beliefs.size());
  if (top_count < 0 || top_count > m)
    throw std::invalid_argument("select_top_b: top_count must lie in [0, M]");
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return beliefs[i] > beliefs[j]; });
  idx.resize(top_count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

CMatrix lmmse_reconstruct(const CMatrix& y, const CMatrix& codes_detected, double V,
                          double sigma2) {
  if (codes_detected.cols() == 0) return CMatrix(0, y.cols());
  if (codes_detected.rows() != y.rows())
    throw std::invalid_argument("lmmse_reconstruct: dimension mismatch");
  const CovFactor f(codes_detected, V, sigma2, y.rows());
  return V * (codes_detected.adjoint() * f.llt.solve(y));
}

DetectorSpec parse_detector(const std::string& s) {
  if (s == "map") return {DetectorKind::map, 0};
  if (s == "cavi") return {DetectorKind::cavi, 5};
  if (s.rfind("cavi:", 0) == 0) {
    const std::string arg = s.substr(5);
    try {
      std::size_t pos = 0;
      const int sweeps = std::stoi(arg, &pos);
      if (pos != arg.size() || sweeps < 0) throw std::invalid_argument(arg);
      return {DetectorKind::cavi, sweeps};
    } catch (const std::exception&) {
      throw std::invalid_argument("detector: bad sweep count '" + arg + "'");
    }
  }
  throw std::invalid_argument("detector: expected 'cavi:<sweeps>' or 'map', got '" + s + "'");
}

DetectionReport sic_pipeline(const model::SlotRealization& slot,
                             const model::SpreadingEnsemble& ens,
                             const design::PowerPlan& plan, const DetectorSpec& detector,
                             bool known_b, CancellationMode cancellation) {
  if (!plan.feasible) throw std::invalid_argument("sic_pipeline: plan is infeasible");
  const int q_count = plan.layers;
  if (slot.activity.size() != static_cast<std::size_t>(q_count) ||
      ens.layer_codes.size() != static_cast<std::size_t>(q_count))
    throw std::invalid_argument("sic_pipeline: layer count mismatch");

  DetectionReport rep;
  rep.layer.resize(q_count);
  CMatrix residual = slot.received;
  for (int q = 0; q < q_count; ++q) {
    const CMatrix& codes = ens.layer_codes[q];
    const double v = plan.layer[q].receive_power;
    const double sigma2 = plan.layer[q].interference_var;
    const double rho = plan.access_prob[q];
    LayerDetection& ld = rep.layer[q];

    if (detector.kind == DetectorKind::cavi) {
      ld.beliefs = cavi_detect(residual, codes, v, sigma2, rho, detector.cavi_sweeps).beliefs;
    } else {
      const auto b = map_bruteforce(residual, codes, v, sigma2, rho);
      ld.beliefs = RVector::Zero(codes.cols());
      for (std::size_t i = 0; i < b.size(); ++i) ld.beliefs[i] = b[i];
    }

    const auto& truth = slot.activity[q];
    if (known_b) {
      const int b_true = static_cast<int>(std::count(truth.begin(), truth.end(), std::uint8_t{1}));
      ld.detected = select_top_b(ld.beliefs, b_true);
    } else {
      for (int dev = 0; dev < codes.cols(); ++dev)
        if (ld.beliefs[dev] > 0.5) ld.detected.push_back(dev);
    }

    std::vector<std::uint8_t> hit(codes.cols(), 0);
    for (int dev : ld.detected) hit[dev] = 1;
    for (int dev = 0; dev < codes.cols(); ++dev) {
      if (truth[dev] && !hit[dev]) ++ld.md_count;
      if (!truth[dev] && hit[dev]) ++ld.fa_count;
    }
    rep.total_md += ld.md_count;
    rep.total_fa += ld.fa_count;

    if (cancellation == CancellationMode::oracle) {
      residual.noalias() -= codes * slot.symbols[q];
    } else if (!ld.detected.empty()) {
      const CMatrix codes_d = gather_columns(codes, ld.detected);
      residual.noalias() -= codes_d * lmmse_reconstruct(residual, codes_d, v, sigma2);
    }
    ld.residual_energy = residual.squaredNorm();
    ld.residual = residual;
  }
  return rep;
}

PepEstimate empirical_pep(const CMatrix& codes, const std::vector<std::uint8_t>& b_true,
                          int flip_index, double V, double sigma2, double rho, int T,
                          int n_trials, RandomStream& rng) {
  const Eigen::Index n = codes.rows();
  const int m = static_cast<int>(codes.cols());
  if (b_true.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("empirical_pep: activity size mismatch");
  if (flip_index < 0 || flip_index >= m)
    throw std::invalid_argument("empirical_pep: flip_index out of range");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("empirical_pep: rho must lie in (0, 1)");
  if (T < 1 || n_trials < 1)
    throw std::invalid_argument("empirical_pep: T and n_trials must be >= 1");

  PepEstimate est;
  est.n_trials = n_trials;
  est.fa_direction = b_true[flip_index] == 0;

  std::vector<std::uint8_t> b_flip = b_true;
  b_flip[flip_index] ^= 1;
  const std::vector<std::uint8_t>& b_small = est.fa_direction ? b_true : b_flip;
  const CMatrix codes_true = gather_columns(codes, b_true);
  const CVector g = codes.col(flip_index);

  // R over the smaller support excludes the flipped device in both directions,
  // so the decision statistic is an exact scaled chi-squared in its quadratic
  // form z = sum_t |g^H R^{-1} y_t|^2.
  const CovFactor f_small(gather_columns(codes, b_small), V, sigma2, n);
  const CVector w = f_small.llt.solve(g);
  const double alpha_small = g.dot(w).real();
  // The other direction's quadratic form sits on the enlarged support
  // R + V g g^H, which shrinks it by 1 / (1 + V alpha).
  if (est.fa_direction) {
    est.alpha = alpha_small;
    est.alpha_prime = alpha_small / (1.0 + V * alpha_small);
  } else {
    est.alpha = alpha_small / (1.0 + V * alpha_small);
    est.alpha_prime = alpha_small;
  }

  const double margin = T * std::log1p(V * alpha_small) + std::log((1.0 - rho) / rho);
  const double scale = V / (1.0 + V * alpha_small);

  const double amp = std::sqrt(V);
  const Eigen::Index b_count = codes_true.cols();
  CMatrix symbols(b_count, T);
  CMatrix noise(n, T);
  std::vector<double> stat(n_trials);
  int errors = 0;
  for (int trial = 0; trial < n_trials; ++trial) {
    for (Eigen::Index col = 0; col < T; ++col)
      for (Eigen::Index row = 0; row < b_count; ++row)
        symbols(row, col) = amp * rng.cgauss(1.0);
    for (Eigen::Index col = 0; col < T; ++col)
      for (Eigen::Index row = 0; row < n; ++row) noise(row, col) = rng.cgauss(sigma2);
    const CMatrix y = codes_true * symbols + noise;
    const double z = (y.adjoint() * w).squaredNorm();
    bool err;
    double chi2_value;
    if (est.fa_direction) {
      // Flipped support wins when the projection energy beats the margin.
      err = scale * z > margin;
      chi2_value = 2.0 * z / alpha_small;
    } else {
      // True device is dropped when its projection energy stays below it.
      err = scale * z < margin;
      chi2_value = 2.0 * z / (alpha_small * (1.0 + V * alpha_small));
    }
    if (err) ++errors;
    stat[trial] = chi2_value;
  }

  est.error_count = errors;
  est.estimate = static_cast<double>(errors) / n_trials;
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / n_trials);

  // Kolmogorov-Smirnov check of the statistic against chi-squared(2T).
  std::sort(stat.begin(), stat.end());
  double d = 0.0;
  for (int i = 0; i < n_trials; ++i) {
    const double cdf = stats::chi2_cdf(2 * T, stat[i]);
    d = std::max(d, std::abs((i + 1.0) / n_trials - cdf));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n_trials));
  }
  est.ks_statistic = d;
  const double sn = std::sqrt(static_cast<double>(n_trials));
  est.ks_pass_1pct = d * (sn + 0.12 + 0.11 / sn) < 1.6276;
  return est;
}

}  // namespace lcra::detect
