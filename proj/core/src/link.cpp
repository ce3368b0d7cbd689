#include "misim/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "misim/linalg.hpp"

namespace misim {

PowerBudget make_power_budget(double received_power, double activation_threshold) {
  PowerBudget b;
  b.received_power = received_power;
  b.activation_threshold = activation_threshold;
  if (received_power > activation_threshold) {
    b.uplink_power = 0.5 * (received_power - activation_threshold);
    b.in_outage = false;
  }
  return b;
}

std::string to_string(Scheme s) { return s == Scheme::Simple ? "SIMPLE" : "ELABORATE"; }

DownlinkBeam mrt_downlink(const ComplexVector& h, double tx_power) {
  DownlinkBeam out;
  const double nrm = h.norm();
  if (!(tx_power >= 0.0)) throw DomainError("mrt_downlink: transmit power must be >= 0");
  if (nrm == 0.0) {
    out.beamformer = ComplexVector::Zero(h.size());
    out.outage = true;
    out.constraint_met = false;
    return out;
  }
  out.beamformer = h.conjugate() / nrm;
  out.pte = nrm * nrm;
  out.sum_pte = out.pte;
  return out;
}

namespace {

ComplexVector dominant_eigenvector(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  return es.eigenvectors().col(m.rows() - 1);
}

}  // namespace

DownlinkBeam coop_downlink_beamform(const ComplexMatrix& h, double tx_power, double activation_power,
                                    Eigen::Index target_index) {
  if (target_index < 0 || target_index >= h.rows()) throw DomainError("coop_downlink_beamform: bad target index");
  const ComplexVector ht = h.row(target_index).transpose();
  if (h.rows() == 1) return mrt_downlink(ht, tx_power);

  const ComplexMatrix a = h.adjoint() * h;
  const ComplexMatrix b = ht.conjugate() * ht.transpose();  // |h_t^T w|^2 = w^H b w
  const double need = tx_power > 0.0 ? activation_power / tx_power : std::numeric_limits<double>::infinity();
  auto finish = [&](ComplexVector w, bool met) {
    DownlinkBeam out;
    out.beamformer = std::move(w);
    out.pte = std::norm(ht.dot(out.beamformer.conjugate()));
    out.sum_pte = (h * out.beamformer).squaredNorm();
    out.constraint_met = met;
    out.outage = !met;
    return out;
  };
  const double best_target = ht.squaredNorm();
  if (best_target < need || best_target == 0.0) {
    DownlinkBeam out = mrt_downlink(ht, tx_power);
    out.sum_pte = (h * out.beamformer).squaredNorm();
    out.constraint_met = false;
    out.outage = true;
    return out;
  }
  auto target_gain = [&](const ComplexVector& w) { return std::norm(ht.dot(w.conjugate())); };
  ComplexVector w = dominant_eigenvector(a);
  if (target_gain(w) >= need) return finish(w, true);

  // |h_t^T w(mu)|^2 grows with mu; bracket then bisect.
  const double scale = a.trace().real() / std::max(b.trace().real(), 1e-300);
  double lo = 0.0, hi = scale;
  while (target_gain(dominant_eigenvector(a + hi * b)) < need && hi < 1e12 * scale) hi *= 4.0;
  ComplexVector w_hi = dominant_eigenvector(a + hi * b);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    ComplexVector wm = dominant_eigenvector(a + mid * b);
    if (target_gain(wm) >= need) {
      hi = mid;
      w_hi = std::move(wm);
    } else {
      lo = mid;
    }
  }
  if (target_gain(w_hi) < need) {
    // numerically flat bracket: fall back to target MRT, which satisfies it
    DownlinkBeam out = mrt_downlink(ht, tx_power);
    out.sum_pte = (h * out.beamformer).squaredNorm();
    return out;
  }
  return finish(w_hi, true);
}

RateResult waterfill(const RealVector& gains, double total_power, double bin_width_hz) {
  if (!(total_power >= 0.0)) throw DomainError("waterfill: total power must be >= 0");
  if (!(bin_width_hz > 0.0)) throw DomainError("waterfill: bin width must be > 0");
  const Eigen::Index n = gains.size();
  RateResult res;
  res.per_bin_power = RealMatrix::Zero(n, 1);
  res.per_bin_rate = RealVector::Zero(n);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(gains[k] >= 0.0)) throw DomainError("waterfill: gains must be >= 0");
    if (gains[k] > 0.0) idx.push_back(k);
  }
  if (idx.empty()) {
    res.unallocated = total_power > 0.0;
    return res;
  }
  if (total_power == 0.0) return res;
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return gains[a] > gains[b]; });
  // largest active set whose water level clears the weakest member's floor
  double sum_inv = 0.0, mu = 0.0;
  std::size_t active = 0;
  for (std::size_t m = 1; m <= idx.size(); ++m) {
    sum_inv += 1.0 / gains[idx[m - 1]];
    const double level = (total_power + sum_inv) / static_cast<double>(m);
    if (level > 1.0 / gains[idx[m - 1]]) {
      mu = level;
      active = m;
    } else {
      break;
    }
  }
  for (std::size_t m = 0; m < active; ++m) {
    const Eigen::Index k = idx[m];
    res.per_bin_power(k, 0) = std::max(0.0, mu - 1.0 / gains[k]);
    res.per_bin_rate[k] = bin_width_hz * std::log2(1.0 + res.per_bin_power(k, 0) * gains[k]);
  }
  res.total_rate = res.per_bin_rate.sum();
  return res;
}

RateResult flat_allocation(const RealVector& gains, const std::vector<bool>& use_bin, double total_power,
                           double bin_width_hz) {
  if (static_cast<Eigen::Index>(use_bin.size()) != gains.size()) throw DomainError("flat_allocation: mask size");
  const Eigen::Index n = gains.size();
  RateResult res;
  res.per_bin_power = RealMatrix::Zero(n, 1);
  res.per_bin_rate = RealVector::Zero(n);
  const auto count = std::count(use_bin.begin(), use_bin.end(), true);
  if (count == 0) {
    res.unallocated = total_power > 0.0;
    return res;
  }
  const double p = total_power / static_cast<double>(count);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!use_bin[static_cast<std::size_t>(k)]) continue;
    res.per_bin_power(k, 0) = p;
    res.per_bin_rate[k] = bin_width_hz * std::log2(1.0 + p * std::max(0.0, gains[k]));
  }
  res.total_rate = res.per_bin_rate.sum();
  return res;
}

double whitened_mrc_gain(const ComplexVector& h, const ComplexMatrix& k) {
  if (k.rows() != h.size() || k.cols() != h.size()) throw DomainError("whitened_mrc_gain: dimension mismatch");
  Eigen::LLT<ComplexMatrix> llt(linalg::hermitian_part(k));
  if (llt.info() != Eigen::Success) throw NumericalError("whitened_mrc_gain: noise covariance is not positive definite");
  const ComplexVector x = llt.matrixL().solve(h);
  return x.squaredNorm();
}

ComplexMatrix whiten(const ComplexMatrix& h, const ComplexMatrix& k) {
  return linalg::inv_sqrtm_hpd(k, "noise covariance") * h;
}

}  // namespace misim
