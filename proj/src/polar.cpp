#include "cgeom/polar.hpp"

#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "cgeom/spectral.hpp"

namespace cgeom {

namespace {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

// Row-wise DFT (unscaled) and its inverse.
MatC rows_fwd(const PolarField& f) {
  Eigen::FFT<double> fft;
  MatC F(f.rows(), f.cols());
  std::vector<double> in(f.cols());
  std::vector<cd> out;
  for (int i = 0; i < f.rows(); ++i) {
    for (int k = 0; k < f.cols(); ++k) in[k] = f(i, k);
    fft.fwd(out, in);
    for (int k = 0; k < f.cols(); ++k) F(i, k) = out[k];
  }
  return F;
}

PolarField rows_inv(const MatC& F) {
  Eigen::FFT<double> fft;
  PolarField f(F.rows(), F.cols());
  std::vector<cd> in(F.cols());
  std::vector<double> out;
  for (int i = 0; i < F.rows(); ++i) {
    for (int k = 0; k < F.cols(); ++k) in[k] = F(i, k);
    fft.inv(out, in);
    for (int k = 0; k < F.cols(); ++k) f(i, k) = out[k];
  }
  return f;
}

VecC vec_fwd(const Eigen::VectorXd& v, int n) {
  if (v.size() == 0) return VecC::Zero(n);
  if (v.size() != n) throw std::invalid_argument("solve_elliptic: end value must have one entry per theta node");
  PolarField row = v.transpose();
  return rows_fwd(row).row(0).transpose();
}

bool theta_independent(const PolarField& f) {
  const double scale = f.cwiseAbs().maxCoeff();
  for (int i = 0; i < f.rows(); ++i)
    if (f.row(i).maxCoeff() - f.row(i).minCoeff() > 1e-12 * (1 + scale)) return false;
  return true;
}

double sup(const PolarField& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

PolarField solve_modes(const PolarGrid& G, const PolarTensor& A, const PolarForm& w, const PolarField& f,
                       const EndCondition& inner, const EndCondition& outer) {
  const int R = G.rows(), n = G.n_theta, N = G.n_s;
  const MatC P = rows_fwd(w.s), Q = rows_fwd(w.t), Fh = rows_fwd(f);
  const VecC gin = vec_fwd(inner.value, n), gout = vec_fwd(outer.value, n);
  const Eigen::VectorXd ass = A.ss.col(0), ast = A.st.col(0), att = A.tt.col(0);
  const MatC D = G.D.cast<cd>();
  MatC U = MatC::Zero(R, n);
  const bool pure_flux = inner.kind != EndKind::dirichlet && outer.kind != EndKind::dirichlet;
  for (int k = 0; k < n; ++k) {
    const int kk = k <= n / 2 ? k : k - n;
    if (n % 2 == 0 && k == n / 2) continue;  // Nyquist mode dropped
    const cd ik(0.0, kk);
    MatC L = D * ass.cast<cd>().asDiagonal() * D;
    L += ik * (D * ast.cast<cd>().asDiagonal());
    L += ik * MatC(ast.cast<cd>().asDiagonal() * D);
    L.diagonal() += -double(kk * kk) * att.cast<cd>();
    const VecC flux_w = ass.cast<cd>().cwiseProduct(P.col(k)) + ast.cast<cd>().cwiseProduct(Q.col(k));
    const VecC tang_w = ast.cast<cd>().cwiseProduct(P.col(k)) + att.cast<cd>().cwiseProduct(Q.col(k));
    VecC rhs = Fh.col(k) + D * flux_w + ik * tang_w;
    auto end_row = [&](int j, const EndCondition& c, cd g, bool is_inner) {
      L.row(j).setZero();
      if (c.kind == EndKind::dirichlet) {
        L(j, j) = 1.0;
        rhs(j) = g;
      } else if (c.kind == EndKind::flux || kk == 0) {
        L.row(j) = ass(j) * D.row(j);
        L(j, j) += ik * ast(j);
        rhs(j) = g + flux_w(j);
      } else {  // regular, k != 0: u ~ r^{|k|} towards the puncture
        L.row(j) = D.row(j);
        L(j, j) -= (is_inner ? 1.0 : -1.0) * std::abs(kk);
        rhs(j) = 0.0;
      }
    };
    end_row(0, inner, gin(k), true);
    end_row(N, outer, gout(k), false);
    VecC u;
    if (pure_flux && kk == 0) {
      MatC La(R + 1, R);
      La.topRows(R) = L;
      La.row(R) = G.ws.cast<cd>().transpose();
      VecC ra(R + 1);
      ra.head(R) = rhs;
      ra(R) = 0.0;
      u = La.colPivHouseholderQr().solve(ra);
    } else {
      u = L.partialPivLu().solve(rhs);
    }
    U.col(k) = u;
  }
  return rows_inv(U);
}

PolarField solve_dense(const PolarGrid& G, const PolarTensor& A, const PolarForm& w, const PolarField& f,
                       const EndCondition& inner, const EndCondition& outer) {
  const int R = G.rows(), n = G.n_theta, N = G.n_s, M = R * n;
  if (M > 3000) throw capability_error("solve_elliptic: theta-dependent coefficients need <= 3000 nodes");
  if (inner.kind == EndKind::regular || outer.kind == EndKind::regular)
    throw capability_error("solve_elliptic: regular end needs theta-independent coefficients");
  Eigen::MatrixXd Dt(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      Dt(j, k) = j == k ? 0.0 : 0.5 * ((j - k) % 2 ? -1.0 : 1.0) / std::tan((j - k) * M_PI / n);
  Eigen::MatrixXd Ds = Eigen::MatrixXd::Zero(M, M), Dth = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < R; ++i)
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < R; ++j) Ds(i * n + k, j * n + k) = G.D(i, j);
      for (int l = 0; l < n; ++l) Dth(i * n + k, i * n + l) = Dt(k, l);
    }
  auto flat = [&](const PolarField& x) {
    Eigen::VectorXd v(M);
    for (int i = 0; i < R; ++i)
      for (int k = 0; k < n; ++k) v(i * n + k) = x(i, k);
    return v;
  };
  const Eigen::VectorXd ass = flat(A.ss), ast = flat(A.st), att = flat(A.tt), p = flat(w.s), q = flat(w.t);
  Eigen::MatrixXd L = Ds * ass.asDiagonal() * Ds + Ds * ast.asDiagonal() * Dth + Dth * ast.asDiagonal() * Ds +
                      Dth * att.asDiagonal() * Dth;
  const Eigen::VectorXd Fs = ass.cwiseProduct(p) + ast.cwiseProduct(q), Ft = ast.cwiseProduct(p) + att.cwiseProduct(q);
  Eigen::VectorXd rhs = flat(f) + Ds * Fs + Dth * Ft;
  auto ends = [&](int i, const EndCondition& c) {
    const Eigen::VectorXd g = c.value.size() ? c.value : Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
      const int row = i * n + k;
      if (c.kind == EndKind::dirichlet) {
        L.row(row).setZero();
        L(row, row) = 1.0;
        rhs(row) = g(k);
      } else {
        L.row(row) = ass(row) * Ds.row(row) + ast(row) * Dth.row(row);
        rhs(row) = g(k) + Fs(row);
      }
    }
  };
  ends(0, inner);
  ends(N, outer);
  Eigen::VectorXd u;
  if (inner.kind == EndKind::flux && outer.kind == EndKind::flux) {
    Eigen::MatrixXd La(M + 1, M);
    La.topRows(M) = L;
    for (int i = 0; i < R; ++i)
      for (int k = 0; k < n; ++k) La(M, i * n + k) = G.ws(i);
    Eigen::VectorXd ra(M + 1);
    ra << rhs, 0.0;
    u = La.colPivHouseholderQr().solve(ra);
  } else {
    u = L.partialPivLu().solve(rhs);
  }
  PolarField U(R, n);
  for (int i = 0; i < R; ++i)
    for (int k = 0; k < n; ++k) U(i, k) = u(i * n + k);
  return U;
}

}  // namespace

PolarGrid PolarGrid::make(double r_in, int n_s, int n_theta) {
  if (!(r_in > 0 && r_in < 1)) throw std::invalid_argument("polar grid: need 0 < r_in < 1");
  if (n_s < 4 || n_theta < 8 || n_theta % 2) throw std::invalid_argument("polar grid: n_s >= 4, even n_theta >= 8");
  PolarGrid G;
  G.n_s = n_s;
  G.n_theta = n_theta;
  G.r_in = r_in;
  const double a = std::log(r_in);
  G.s = cheb_nodes<double>(n_s, a, 0.0);
  G.r = G.s.array().exp();
  G.r(n_s) = 1.0;
  G.theta.resize(n_theta);
  for (int k = 0; k < n_theta; ++k) G.theta(k) = 2 * M_PI * k / n_theta;
  G.D = cheb_diff<double>(n_s, a, 0.0);
  G.ws = clenshaw_curtis<double>(n_s, a, 0.0);
  return G;
}

Vec<2> PolarGrid::point(int i, int k) const { return Vec<2>(r(i) * std::cos(theta(k)), r(i) * std::sin(theta(k))); }

PolarField PolarGrid::radius() const { return r.replicate(1, n_theta); }

PolarField PolarGrid::d_theta(const PolarField& f) const {
  PolarField g(f.rows(), f.cols());
  for (int i = 0; i < f.rows(); ++i) g.row(i) = fourier_derivative(f.row(i).transpose()).transpose();
  return g;
}

double PolarGrid::integrate(const PolarField& f) const { return ws.dot(f.rowwise().sum()) * 2 * M_PI / n_theta; }

Eigen::VectorXd PolarGrid::circulation(const PolarForm& w) const { return w.t.rowwise().sum() * 2 * M_PI / n_theta; }

PolarField PolarGrid::integrate_form(const PolarForm& w, Eigen::VectorXd* ring_means) const {
  const Eigen::VectorXd means = w.t.rowwise().mean();
  if (ring_means) *ring_means = means;
  Eigen::MatrixXd Dm = D;
  Dm.row(n_s).setZero();
  Dm(n_s, n_s) = 1.0;
  Eigen::VectorXd rhs = w.s.col(0);
  rhs(n_s) = 0.0;
  const Eigen::VectorXd radial = Dm.partialPivLu().solve(rhs);
  PolarField phi(rows(), n_theta);
  for (int i = 0; i < rows(); ++i) {
    const Eigen::VectorXd ring = (w.t.row(i).array() - means(i)).transpose();
    phi.row(i) = (fourier_antiderivative(ring).array() + radial(i)).transpose();
  }
  return phi;
}

PolarField PolarGrid::sample(const std::function<double(const Vec<2>&)>& f) const {
  PolarField v(rows(), n_theta);
  for (int i = 0; i < rows(); ++i)
    for (int k = 0; k < n_theta; ++k) v(i, k) = f(point(i, k));
  return v;
}

PolarForm PolarGrid::sample_form(const std::function<Vec<2>(const Vec<2>&)>& f) const {
  PolarForm w{zeros(), zeros()};
  for (int i = 0; i < rows(); ++i)
    for (int k = 0; k < n_theta; ++k) {
      const Vec<2> c = f(point(i, k));
      const double cs = std::cos(theta(k)), sn = std::sin(theta(k));
      w.s(i, k) = r(i) * (c(0) * cs + c(1) * sn);
      w.t(i, k) = r(i) * (-c(0) * sn + c(1) * cs);
    }
  return w;
}

Vec<2> PolarGrid::cartesian(const PolarForm& w, int i, int k) const {
  const double cs = std::cos(theta(k)), sn = std::sin(theta(k));
  return Vec<2>(cs * w.s(i, k) - sn * w.t(i, k), sn * w.s(i, k) + cs * w.t(i, k)) / r(i);
}

PolarTensor energy_tensor(const PolarGrid& G, const PolarForm& w1, const PolarForm& w2) {
  PolarTensor A{G.zeros(), G.zeros(), G.zeros()};
  for (int i = 0; i < G.rows(); ++i)
    for (int k = 0; k < G.n_theta; ++k) {
      const double gss = w1.s(i, k) * w1.s(i, k) + w2.s(i, k) * w2.s(i, k);
      const double gst = w1.s(i, k) * w1.t(i, k) + w2.s(i, k) * w2.t(i, k);
      const double gtt = w1.t(i, k) * w1.t(i, k) + w2.t(i, k) * w2.t(i, k);
      const double det = std::abs(w1.s(i, k) * w2.t(i, k) - w1.t(i, k) * w2.s(i, k));
      if (!(det > 0)) throw std::domain_error("energy_tensor: degenerate coframe");
      A.ss(i, k) = gtt / det;
      A.st(i, k) = -gst / det;
      A.tt(i, k) = gss / det;
    }
  return A;
}

PolarTensor identity_tensor(const PolarGrid& G) {
  return {PolarField::Ones(G.rows(), G.n_theta), G.zeros(), PolarField::Ones(G.rows(), G.n_theta)};
}

PolarForm apply(const PolarTensor& A, const PolarForm& w) {
  return {A.ss.cwiseProduct(w.s) + A.st.cwiseProduct(w.t), A.st.cwiseProduct(w.s) + A.tt.cwiseProduct(w.t)};
}

PolarField solve_elliptic(const PolarGrid& G, const PolarTensor& A, const PolarForm& w, const PolarField& f,
                          const EndCondition& inner, const EndCondition& outer, EllipticReport* rep) {
  const bool modes = theta_independent(A.ss) && theta_independent(A.st) && theta_independent(A.tt);
  const PolarField u = modes ? solve_modes(G, A, w, f, inner, outer) : solve_dense(G, A, w, f, inner, outer);
  if (rep) {
    rep->decoupled = modes;
    const PolarForm du = G.d(u);
    const PolarForm F = apply(A, {du.s - w.s, du.t - w.t});
    const PolarField res = G.d_s(F.s) + G.d_theta(F.t) - f;
    const PolarForm Aw = apply(A, w);
    double scale = std::max({sup(f), sup(G.d_s(Aw.s) + G.d_theta(Aw.t)), sup(Aw.s), sup(Aw.t), sup(u)});
    double r = sup(res.middleRows(1, G.n_s - 1));
    auto end_res = [&](int i, const EndCondition& c) {
      const Eigen::VectorXd g = c.value.size() ? c.value : Eigen::VectorXd::Zero(G.n_theta);
      if (c.kind == EndKind::dirichlet) return (u.row(i).transpose() - g).cwiseAbs().maxCoeff();
      if (c.kind == EndKind::flux) return (F.s.row(i).transpose() - g).cwiseAbs().maxCoeff();
      return std::abs(F.s.row(i).mean() - g.mean());
    };
    r = std::max({r, end_res(0, inner), end_res(G.n_s, outer)});
    rep->residual = r / std::max(scale, 1.0);  // absolute for O(1) data and below
  }
  return u;
}

}  // namespace cgeom
