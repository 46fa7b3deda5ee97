#include "cgeom/spectral.hpp"

#include <complex>
#include <unsupported/Eigen/FFT>

namespace cgeom {

std::vector<double> fornberg(double x0, const std::vector<double>& xs, int m) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

std::vector<std::complex<double>> forward(const Eigen::VectorXd& f) {
  Eigen::FFT<double> fft;
  std::vector<double> in(f.data(), f.data() + f.size());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  return out;
}

Eigen::VectorXd backward(const std::vector<std::complex<double>>& F) {
  Eigen::FFT<double> fft;
  std::vector<double> out;
  fft.inv(out, F);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace

Eigen::VectorXd fourier_derivative(const Eigen::VectorXd& f, int order) {
  const int n = static_cast<int>(f.size());
  auto F = forward(f);
  for (int k = 0; k < n; ++k) {
    int kk = k <= n / 2 ? k : k - n;
    if (n % 2 == 0 && k == n / 2 && order % 2 == 1) kk = 0;  // Nyquist
    std::complex<double> ik(0.0, static_cast<double>(kk));
    std::complex<double> m(1.0, 0.0);
    for (int o = 0; o < order; ++o) m *= ik;
    F[k] *= m;
  }
  return backward(F);
}

Eigen::VectorXd fourier_antiderivative(const Eigen::VectorXd& f) {
  const int n = static_cast<int>(f.size());
  auto F = forward(f);
  F[0] = 0.0;
  for (int k = 1; k < n; ++k) {
    int kk = k <= n / 2 ? k : k - n;
    if (n % 2 == 0 && k == n / 2) {
      F[k] = 0.0;
      continue;
    }
    F[k] /= std::complex<double>(0.0, static_cast<double>(kk));
  }
  Eigen::VectorXd g = backward(F);
  return g.array() - g(0);
}

}  // namespace cgeom
