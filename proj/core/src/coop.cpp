#include "misim/coop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "misim/linalg.hpp"

namespace misim {

std::vector<ComplexMatrix> node_power_matrices(const ComplexMatrix& z_t_in) {
  const Eigen::Index n = z_t_in.rows();
  const RealMatrix re = 0.5 * (z_t_in.real() + z_t_in.real().transpose());
  const ComplexMatrix a = linalg::inv_sqrtm_spd(re, "Re Z_T^in").cast<Complex>();
  const ComplexMatrix za = z_t_in * a;
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const ComplexMatrix m = a.col(i) * za.row(i);
    out.push_back(linalg::hermitian_part(m));
  }
  return out;
}

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double logdet_nats(const ComplexMatrix& h, const ComplexMatrix& q) {
  const Eigen::Index nr = h.rows();
  const ComplexMatrix m = ComplexMatrix::Identity(nr, nr) + h * q * h.adjoint();
  Eigen::LLT<ComplexMatrix> llt(linalg::hermitian_part(m));
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const auto d = llt.matrixLLT().diagonal();
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) s += 2.0 * std::log(d[i].real());
  return s;
}

ComplexMatrix clip_psd(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(linalg::hermitian_part(a));
  const RealVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_re(const ComplexMatrix& q, const ComplexMatrix& b) { return (q * b).trace().real(); }

// Scales q down until every per-node constraint holds.
ComplexMatrix make_feasible(ComplexMatrix q, const std::vector<ComplexMatrix>& b, const RealVector& p) {
  double worst = 0.0;
  for (std::size_t n = 0; n < b.size(); ++n) worst = std::max(worst, trace_re(q, b[n]) / p[static_cast<Eigen::Index>(n)]);
  if (worst > 1.0) q /= worst;
  return q;
}

struct DualPoint {
  double value = std::numeric_limits<double>::infinity();  // nats
  ComplexMatrix q;
  RealVector grad;
};

DualPoint dual(const ComplexMatrix& h, const std::vector<ComplexMatrix>& b, const RealVector& p, const RealVector& lam) {
  const Eigen::Index nt = h.cols();
  ComplexMatrix bl = ComplexMatrix::Zero(nt, nt);
  for (std::size_t n = 0; n < b.size(); ++n) bl += lam[static_cast<Eigen::Index>(n)] * b[n];
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eb(linalg::hermitian_part(bl));
  DualPoint out;
  const RealVector ev = eb.eigenvalues();
  if (!(ev.minCoeff() > 1e-14 * std::max(ev.maxCoeff(), 1e-300))) return out;
  const ComplexMatrix w = eb.eigenvectors() * ev.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                          eb.eigenvectors().adjoint();  // B^-1/2
  const ComplexMatrix g = h * w;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eg(g.adjoint() * g);
  const RealVector s = eg.eigenvalues();
  RealVector alloc = RealVector::Zero(nt);
  double val = lam.dot(p);
  for (Eigen::Index i = 0; i < nt; ++i) {
    if (s[i] > 1.0) {
      alloc[i] = 1.0 - 1.0 / s[i];
      val += std::log(s[i]) - 1.0 + 1.0 / s[i];
    }
  }
  const ComplexMatrix qt = eg.eigenvectors() * alloc.cast<Complex>().asDiagonal() * eg.eigenvectors().adjoint();
  out.q = w * qt * w;
  out.value = val;
  out.grad.resize(static_cast<Eigen::Index>(b.size()));
  for (std::size_t n = 0; n < b.size(); ++n) out.grad[static_cast<Eigen::Index>(n)] = p[static_cast<Eigen::Index>(n)] - trace_re(out.q, b[n]);
  return out;
}

// Real coordinates for Hermitian n x n matrices.
std::vector<ComplexMatrix> hermitian_basis(Eigen::Index n) {
  std::vector<ComplexMatrix> e;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      if (i == j) {
        m(i, i) = 1.0;
        e.push_back(m);
        continue;
      }
      m(i, j) = m(j, i) = 1.0;
      e.push_back(m);
      m(i, j) = Complex(0.0, 1.0);
      m(j, i) = Complex(0.0, -1.0);
      e.push_back(m);
    }
  return e;
}

// Log-barrier method on the primal with damped Newton centring. At each
// centre the multipliers 1/(t s_n) are dual feasible, so their dual value is
// a certified bound. Stops when done() or after max_newton steps.
template <class Consider, class Bound, class Done>
void barrier_polish(const ComplexMatrix& h, const std::vector<ComplexMatrix>& b, const RealVector& p, ComplexMatrix q,
                    double t, int max_newton, Consider&& consider, Bound&& bound, Done&& done) {
  const Eigen::Index na = h.cols(), nr = h.rows();
  const auto basis = hermitian_basis(na);
  const auto nk = static_cast<Eigen::Index>(basis.size());
  const auto nb = b.size();

  struct Eval {
    bool ok = false;
    double f0 = 0.0;
    RealVector s;
    ComplexMatrix g, l;
  };
  auto eval = [&](const ComplexMatrix& x) {
    Eval e;
    e.s.resize(static_cast<Eigen::Index>(nb));
    for (std::size_t n = 0; n < nb; ++n) {
      e.s[static_cast<Eigen::Index>(n)] = p[static_cast<Eigen::Index>(n)] - trace_re(x, b[n]);
      if (!(e.s[static_cast<Eigen::Index>(n)] > 0.0)) return e;
    }
    Eigen::LLT<ComplexMatrix> lq(linalg::hermitian_part(x));
    if (lq.info() != Eigen::Success) return e;
    e.l = lq.matrixL();
    for (Eigen::Index i = 0; i < na; ++i)
      if (!(e.l(i, i).real() > 0.0)) return e;
    const ComplexMatrix m = ComplexMatrix::Identity(nr, nr) + h * x * h.adjoint();
    e.f0 = logdet_nats(h, x);
    e.g = linalg::hermitian_part(h.adjoint() * linalg::solve(m, h, "log-det gradient"));
    e.ok = std::isfinite(e.f0);
    return e;
  };

  Eval cur = eval(q);
  if (!cur.ok) return;
  int steps = 0;
  while (steps < max_newton) {
    // centring
    int inner = 0;
    double last_dec = std::numeric_limits<double>::infinity();
    while (steps < max_newton) {
      ++steps;
      // directions L E_k L^H with Q = L L^H keep the log det Q term at identity
      const RealVector w = cur.s.cwiseInverse();
      std::vector<ComplexMatrix> dir(static_cast<std::size_t>(nk)), ge(static_cast<std::size_t>(nk));
      RealMatrix bt(static_cast<Eigen::Index>(nb), nk);  // tr(B_n D_k)
      RealVector grad(nk);
      for (Eigen::Index k = 0; k < nk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        dir[ku] = cur.l * basis[ku] * cur.l.adjoint();
        ge[ku] = cur.g * dir[ku];
        for (std::size_t n = 0; n < nb; ++n) bt(static_cast<Eigen::Index>(n), k) = trace_re(b[n], dir[ku]);
        grad[k] = t * ge[ku].trace().real() + basis[ku].trace().real() - w.dot(bt.col(k));
      }
      RealMatrix hess(nk, nk);
      for (Eigen::Index k = 0; k < nk; ++k)
        for (Eigen::Index l = k; l < nk; ++l) {
          const auto ku = static_cast<std::size_t>(k), lu = static_cast<std::size_t>(l);
          const double v = t * (ge[ku] * ge[lu]).trace().real() + (basis[ku] * basis[lu]).trace().real() +
                           (w.cwiseProduct(bt.col(k))).dot(w.cwiseProduct(bt.col(l)));
          hess(k, l) = hess(l, k) = v;  // negated Hessian, positive definite
        }
      const RealVector d = hess.ldlt().solve(grad);
      const double dec = grad.dot(d);
      // quadratic convergence stalls at the rounding floor of the gradient
      if (!(dec > 1e-12) || ++inner > 50 || (dec < 1e-8 && dec > 0.25 * last_dec)) break;
      last_dec = dec;
      ComplexMatrix dq = ComplexMatrix::Zero(na, na);
      for (Eigen::Index k = 0; k < nk; ++k) dq += d[k] * dir[static_cast<std::size_t>(k)];
      // damped Newton step of a self-concordant function: feasible and
      // improving without comparing phi values, which lose digits as t grows
      double a = dec < 0.0625 ? 1.0 : 1.0 / (1.0 + std::sqrt(dec));
      bool moved = false;
      for (int bt_it = 0; bt_it < 40; ++bt_it, a *= 0.5) {
        Eval nxt = eval(q + a * dq);
        if (nxt.ok) {
          q += a * dq;
          cur = std::move(nxt);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    consider(q);
    RealVector lam = (t * cur.s.array()).inverse().matrix();
    const DualPoint dp = dual(h, b, p, lam);
    if (std::isfinite(dp.value)) {
      bound(dp.value);
      consider(dp.q);
    }
    if (done()) return;
    t *= 8.0;
    cur = eval(q);
    if (!cur.ok) return;
  }
}

}  // namespace

LogDetResult max_logdet_sum_power(const ComplexMatrix& h, double total_power) {
  const Eigen::Index nt = h.cols();
  LogDetResult res;
  res.q = ComplexMatrix::Zero(nt, nt);
  res.converged = true;
  if (!(total_power > 0.0)) return res;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.adjoint() * h);
  const RealVector s = es.eigenvalues().cwiseMax(0.0);
  const RealVector gains = s;
  const RateResult wf = waterfill(gains, total_power, 1.0);
  const RealVector q = wf.per_bin_power.col(0);
  res.q = es.eigenvectors() * q.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  res.rate = wf.total_rate;
  res.dual_bound = res.rate;
  return res;
}

LogDetResult max_logdet_per_node(const ComplexMatrix& h_full, const std::vector<ComplexMatrix>& b_full,
                                 const RealVector& budgets, const LogDetOptions& opts) {
  const Eigen::Index nt = h_full.cols();
  if (static_cast<Eigen::Index>(b_full.size()) != nt || budgets.size() != nt)
    throw DomainError("max_logdet_per_node: need one constraint matrix and budget per node");
  LogDetResult res;
  res.q = ComplexMatrix::Zero(nt, nt);
  res.converged = true;

  // nodes without budget stay silent
  std::vector<Eigen::Index> act;
  for (Eigen::Index n = 0; n < nt; ++n) {
    if (budgets[n] < 0.0) throw DomainError("max_logdet_per_node: budgets must be >= 0");
    if (budgets[n] > 0.0) act.push_back(n);
  }
  if (act.empty() || h_full.squaredNorm() == 0.0) return res;
  const auto na = static_cast<Eigen::Index>(act.size());
  ComplexMatrix h(h_full.rows(), na);
  RealVector p(na);
  std::vector<ComplexMatrix> b(act.size(), ComplexMatrix(na, na));
  for (Eigen::Index i = 0; i < na; ++i) {
    h.col(i) = h_full.col(act[static_cast<std::size_t>(i)]);
    p[i] = budgets[act[static_cast<std::size_t>(i)]];
    for (Eigen::Index r = 0; r < na; ++r)
      for (Eigen::Index c = 0; c < na; ++c)
        b[static_cast<std::size_t>(i)](r, c) = b_full[static_cast<std::size_t>(act[static_cast<std::size_t>(i)])](
            act[static_cast<std::size_t>(r)], act[static_cast<std::size_t>(c)]);
  }
  auto scatter = [&](const ComplexMatrix& q) {
    ComplexMatrix out = ComplexMatrix::Zero(nt, nt);
    for (Eigen::Index r = 0; r < na; ++r)
      for (Eigen::Index c = 0; c < na; ++c) out(act[static_cast<std::size_t>(r)], act[static_cast<std::size_t>(c)]) = q(r, c);
    return out;
  };

  if (na == 1) {
    const double bnn = b[0](0, 0).real();
    ComplexMatrix q(1, 1);
    q(0, 0) = p[0] / bnn;
    res.q = scatter(q);
    res.rate = std::log2(1.0 + q(0, 0).real() * h.col(0).squaredNorm());
    res.dual_bound = res.rate;
    return res;
  }

  // dual start: sum-power water level
  const LogDetResult sp = max_logdet_sum_power(h, p.sum());
  double mu = 0.0;
  {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.adjoint() * h);
    const ComplexMatrix qd = es.eigenvectors().adjoint() * sp.q * es.eigenvectors();
    for (Eigen::Index i = 0; i < na; ++i)
      if (qd(i, i).real() > 0.0) mu = std::max(mu, qd(i, i).real() + 1.0 / es.eigenvalues()[i]);
  }
  RealVector u = RealVector::Constant(na, std::log(mu > 0.0 ? 1.0 / mu : 1.0));  // log multipliers

  ComplexMatrix best_q = ComplexMatrix::Zero(na, na);
  double best_primal = 0.0;
  double best_dual = std::numeric_limits<double>::infinity();
  auto consider = [&](const ComplexMatrix& q) {
    const ComplexMatrix qf = make_feasible(clip_psd(q), b, p);
    const double v = logdet_nats(h, qf);
    if (v > best_primal) {
      best_primal = v;
      best_q = qf;
    }
  };
  auto gap = [&] { return (best_dual - best_primal) / std::max(best_dual, 1e-300); };

  DualPoint cur = dual(h, b, p, u.array().exp().matrix());
  double step = 1.0;
  for (int it = 0; it < opts.max_dual_iters && std::isfinite(cur.value); ++it) {
    best_dual = std::min(best_dual, cur.value);
    consider(cur.q);
    if (gap() < opts.gap_tol) break;
    const RealVector lam = u.array().exp().matrix();
    const RealVector gu = lam.cwiseProduct(cur.grad) / std::max(cur.value, 1e-300);  // d g / d u, normalized
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const RealVector un = u - step * gu;
      DualPoint nxt = dual(h, b, p, un.array().exp().matrix());
      if (std::isfinite(nxt.value) &&
          nxt.value <= cur.value - 1e-4 * step * gu.squaredNorm() * std::max(cur.value, 1e-300)) {
        u = un;
        cur = std::move(nxt);
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (std::isfinite(cur.value)) {
    best_dual = std::min(best_dual, cur.value);
    consider(cur.q);
  }

  if (!(gap() < opts.gap_tol) && opts.max_primal_iters > 0) {
    // strictly feasible start near the best point so far
    ComplexMatrix q0 = 0.9 * best_q;
    double eps = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < b.size(); ++n) {
      const double tb = b[n].trace().real();
      if (tb > 0.0) eps = std::min(eps, 0.5 * (p[static_cast<Eigen::Index>(n)] - trace_re(q0, b[n])) / tb);
    }
    if (!std::isfinite(eps)) eps = p.maxCoeff();
    q0 += eps * ComplexMatrix::Identity(na, na);
    // barrier parameter 2 na over the start point's own gap
    const double width = std::isfinite(best_dual) ? std::max(best_dual - logdet_nats(h, q0), 1e-12) : 1.0;
    const double t0 = std::max(2.0 * static_cast<double>(na) / width, 1e-3);
    barrier_polish(h, b, p, q0, t0, opts.max_primal_iters, consider,
                   [&](double v) { best_dual = std::min(best_dual, v); },
                   [&] { return std::isfinite(best_dual) && gap() < opts.gap_tol; });
  }

  res.q = scatter(best_q);
  res.rate = best_primal / kLn2;
  res.dual_bound = std::isfinite(best_dual) ? best_dual / kLn2 : std::numeric_limits<double>::infinity();
  res.relative_gap = std::isfinite(best_dual) ? gap() : std::numeric_limits<double>::infinity();
  res.converged = res.relative_gap < opts.gap_tol;
  return res;
}

RateResult coop_uplink_rate(const std::vector<CoopUplinkBin>& bins, const RealVector& budgets, double bin_width_hz,
                            bool heuristic_alloc, const LogDetOptions& opts) {
  if (!(bin_width_hz > 0.0)) throw DomainError("coop_uplink_rate: bin width must be > 0");
  const auto nk = static_cast<Eigen::Index>(bins.size());
  const Eigen::Index nn = budgets.size();
  RateResult res;
  res.scheme = Scheme::Elaborate;
  res.per_bin_power = RealMatrix::Zero(nk, nn);
  res.per_bin_rate = RealVector::Zero(nk);
  if (nk == 0) return res;

  std::vector<std::vector<ComplexMatrix>> b(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k].h_white.cols() != nn) throw DomainError("coop_uplink_rate: channel width differs from node count");
    b[k] = node_power_matrices(bins[k].z_t_in);
  }
  for (Eigen::Index n = 0; n < nn; ++n) {
    if (!(budgets[n] >= 0.0)) throw DomainError("coop_uplink_rate: budgets must be >= 0");
    if (heuristic_alloc) {
      RealVector g(nk);
      for (Eigen::Index k = 0; k < nk; ++k) {
        const double bnn = b[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)](n, n).real();
        g[k] = bnn > 0.0 ? bins[static_cast<std::size_t>(k)].h_white.col(n).squaredNorm() / bnn : 0.0;
      }
      res.per_bin_power.col(n) = waterfill(g, budgets[n], bin_width_hz).per_bin_power.col(0);
    } else {
      res.per_bin_power.col(n).setConstant(budgets[n] / static_cast<double>(nk));
    }
  }
  double worst_gap = 0.0;
  for (Eigen::Index k = 0; k < nk; ++k) {
    const auto& bin = bins[static_cast<std::size_t>(k)];
    const RealVector pk = res.per_bin_power.row(k).transpose();
    const LogDetResult r = max_logdet_per_node(bin.h_white, b[static_cast<std::size_t>(k)], pk, opts);
    res.per_bin_rate[k] = bin_width_hz * r.rate;
    if (r.rate > 0.0) worst_gap = std::max(worst_gap, r.relative_gap);
  }
  res.total_rate = res.per_bin_rate.sum();
  res.kkt_residual = worst_gap;
  if (worst_gap > opts.gap_tol) {
    std::ostringstream os;
    os << "per-node log-det solver left a relative duality gap of " << worst_gap;
    res.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace misim
