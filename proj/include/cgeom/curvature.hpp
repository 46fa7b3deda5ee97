#pragma once

// Conventions (fixed once, used everywhere):
//   R^l_{ijk} = d_j G^l_{ik} - d_k G^l_{ij} + G^l_{jm} G^m_{ik} - G^l_{km} G^m_{ij},
//   i.e. R(d_j, d_k) d_i = R^l_{ijk} d_l;   R_{lijk} = g_{lm} R^m_{ijk};
//   Ric_{ik} = R^l_{ilk};  unit sphere: R_{abab} = +1, Scal = n(n-1).
//   4D: Sch = (Ric - Scal/6 g)/2, J = Scal/6, W = Riem - Sch (KN) g,
//   Cot_{ijk} = nabla_i Sch_{jk} - nabla_j Sch_{ik},
//   B_{ij} = (Lap Sch)_{ij} - nabla^2_{ij} J - 4 Sch_i^p Sch_{pj} + |Sch|^2 g_{ij} + 2 Sch^{pk} W_{kipj}.

#include <array>
#include <vector>

#include "cgeom/io.hpp"
#include "cgeom/metric.hpp"

namespace cgeom {

enum class CurvatureLevel { riemann = 2, cotton = 3, bach = 4 };

template <int D>
using Christoffel = std::array<JetMat<double, D>, D>;  // [k](i,j) = Gamma^k_ij

template <int D>
using Riem = Eigen::Matrix<double, D * D, D * D>;  // (l*D+i, j*D+k) -> R_lijk

template <int D>
struct CurvaturePoint {
  int level = 2;
  Mat<D> g, ginv;
  double sqrt_det = 0;
  std::array<Mat<D>, D> gamma;  // [k](i,j)
  Riem<D> riem;
  Mat<D> ric;
  double scal = 0;
  // 4D (zero otherwise)
  Mat<D> sch = Mat<D>::Zero();
  double J = 0;
  Riem<D> weyl = Riem<D>::Zero();
  std::array<Mat<D>, D> cot{};        // [i](j,k)
  std::array<Mat<D>, D> nabla_sch{};  // [k](i,j) = nabla_k Sch_ij
  Vec<D> grad_J = Vec<D>::Zero();
  Mat<D> lap_sch = Mat<D>::Zero(), hess_J = Mat<D>::Zero(), bach = Mat<D>::Zero();
  double lap_J = 0;

  double gauss_curvature() const { return scal / 2; }
  double norm_riem() const;
  double norm_ric() const;
  double norm_sch() const;
  double norm_weyl() const;
  double norm_cot() const;
  double norm_bach() const;
};

// Curvature from metric jets at one point; the jet order must be >= level.
template <int D>
CurvaturePoint<D> curvature_from_jets(const JetMat<double, D>& g, CurvatureLevel level);

template <int D>
CurvaturePoint<D> curvature_at(const MetricField<D>& g, const Vec<D>& x,
                               CurvatureLevel level = CurvatureLevel::bach);

template <int D>
struct CurvaturePack {
  Chart chart;
  CurvatureLevel level;
  std::vector<CurvaturePoint<D>> pts;

  // L2 / L4 / sup of every pointwise norm over the chart (dvol_g).
  json summary() const;
  // One row per node: coordinates, J, |Riem|, |Ric|, |Sch|, |W|, |Cot|, |B|, tr_g B.
  std::string csv() const;
};

// Closed-form metrics are evaluated on chart nodes; sampled metrics on their own box.
template <int D>
CurvaturePack<D> curvature_pack(const MetricField<D>& g, const Chart& chart,
                                CurvatureLevel level = CurvatureLevel::bach);
template <int D>
CurvaturePack<D> curvature_pack(const MetricField<D>& g, CurvatureLevel level = CurvatureLevel::riemann);

// Jet-level tensor calculus (orders drop by one per derivative).
template <int D>
Christoffel<D> christoffel(const JetMat<double, D>& g, const JetMat<double, D>& ginv);
template <int D>
JetMat<double, D> hessian(const Christoffel<D>& gam, const Jet<double, D>& f);
template <int D>
Jet<double, D> laplacian(const JetMat<double, D>& ginv, const Christoffel<D>& gam, const Jet<double, D>& f);
// [k](i,j) = nabla_k T_ij for a covariant 2-tensor.
template <int D>
std::array<JetMat<double, D>, D> covariant_derivative(const Christoffel<D>& gam, const JetMat<double, D>& T);
template <int D>
JetMat<double, D> rough_laplacian(const JetMat<double, D>& ginv, const Christoffel<D>& gam,
                                  const JetMat<double, D>& T);

// Scalar curvature as a jet (two orders below the metric jets).
template <int D>
Jet<double, D> scalar_curvature_jet(const JetMat<double, D>& g);

// Point-value wrappers for closed-form inputs.
template <int D>
Mat<D> hessian(const MetricField<D>& g, const std::function<Jet<double, D>(const JetVec<double, D>&)>& f,
               const Vec<D>& x);
template <int D>
double laplacian(const MetricField<D>& g, const std::function<Jet<double, D>(const JetVec<double, D>&)>& f,
                 const Vec<D>& x);
Mat<4> rough_laplacian(const MetricField<4>& g,
                       const std::function<JetMat<double, 4>(const JetVec<double, 4>&)>& T, const Vec<4>& x);

// Second route to Bach: Riemann from the explicit second-derivative formula,
// Weyl from the Ricci decomposition, B = nabla^k Cot_kij + Sch^kl W_kilj.
Mat<4> bach_via_cotton(const JetMat<double, 4>& g);
// max over nodes of |B - B'| / (1 + max|B|).
double bach_cross_check(const MetricField<4>& g, const Chart& chart);

// Riemann as a 4-index accessor.
template <int D>
double riem_at(const Riem<D>& R, int l, int i, int j, int k) {
  return R(l * D + i, j * D + k);
}
// Kulkarni–Nomizu product (A (KN) B)_lijk.
template <int D>
Riem<D> kulkarni_nomizu(const Mat<D>& A, const Mat<D>& B);
template <int D>
double norm2_tensor(const Mat<D>& ginv, const Mat<D>& T);  // |T|^2_g
template <int D>
double norm2_riem(const Mat<D>& ginv, const Riem<D>& R);

}  // namespace cgeom
