#include "cgeom/catalog.hpp"

#include <cmath>
#include <stdexcept>

#include "cgeom/conformal.hpp"

namespace cgeom {

double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter '" + key + "' is not a number: " + it->second);
  }
}

std::string param_str(const Params& p, const std::string& key, const std::string& fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

namespace {

template <int D>
Jet<double, D> r2_of(const JetVec<double, D>& x) {
  Jet<double, D> s = x(0) * x(0);
  for (int i = 1; i < D; ++i) s += x(i) * x(i);
  return s;
}

template <int D>
JetMat<double, D> scalar_times_id(const Jet<double, D>& f) {
  JetMat<double, D> m;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) m(i, j) = i == j ? f : Jet<double, D>(0.0, f.order());
  return m;
}

// C-infinity bump supported in |t| < 1: exp(1 - 1/(1 - t^2)).
template <int D>
Jet<double, D> compact_bump(const Jet<double, D>& t2) {
  if (t2.value() >= 1.0) return Jet<double, D>(0.0, t2.order());
  return exp(1.0 - 1.0 / (1.0 - t2));
}

}  // namespace

template <int D>
Jet<double, D> bump_profile(const JetVec<double, D>& x, double amp, double center, double width,
                            const std::string& profile) {
  const Jet<double, D> r2 = r2_of<D>(x);
  if (profile == "gaussian") {
    if (center == 0) return amp * exp(-r2 / width);
    const Jet<double, D> t = sqrt(r2) - center;
    return amp * exp(-(t * t) / width);
  }
  if (profile == "compact") {
    // width is the support half-width in r
    if (center == 0) return amp * compact_bump<D>(r2 / (width * width));
    const Jet<double, D> t = (sqrt(r2) - center) / width;
    return amp * compact_bump<D>(t * t);
  }
  throw std::invalid_argument("conformal_bump: profile must be gaussian or compact");
}

template Jet<double, 2> bump_profile<2>(const JetVec<double, 2>&, double, double, double, const std::string&);
template Jet<double, 4> bump_profile<4>(const JetVec<double, 4>&, double, double, double, const std::string&);

MetricField<4> catalog4(const std::string& name, const Params& p) {
  using J4 = Jet<double, 4>;
  using X = JetVec<double, 4>;
  if (name == "flat4")
    return MetricField<4>::closed("flat4", [](const X& x) { return scalar_times_id<4>(J4(1.0, x(0).order())); })
        .set_radial();
  if (name == "round_sphere4")
    return MetricField<4>::closed("round_sphere4",
                                  [](const X& x) {
                                    const J4 f = 1.0 + r2_of<4>(x);
                                    return scalar_times_id<4>(4.0 / (f * f));
                                  })
        .set_radial();
  if (name == "conformal_bump") {
    const double amp = param(p, "amp", 0.1), c = param(p, "center", 0.6), w = param(p, "width", 0.02);
    const std::string prof = param_str(p, "profile", "gaussian");
    bump_profile<4>(seed<double, 4>(Vec<4>(0.5, 0.1, 0, 0), 0), amp, c, w, prof);  // validate
    return MetricField<4>::closed("conformal_bump",
                                  [=](const X& x) {
                                    return scalar_times_id<4>(exp(2.0 * bump_profile<4>(x, amp, c, w, prof)));
                                  })
        .with_domain(c == 0 ? 0.0 : 1e-6, 1e300)
        .set_radial();
  }
  if (name == "ale") {
    const double a = param(p, "a", 1.0), R = param(p, "R", 1.0);
    return MetricField<4>::closed("ale", [=](const X& x) { return scalar_times_id<4>(1.0 + a / r2_of<4>(x)); })
        .with_domain(R, 1e300)
        .set_radial();
  }
  if (name == "compactified") {
    auto h = invert_compactify(catalog4("ale", p));
    return h;
  }
  if (name == "cone") {
    const double beta = param(p, "beta", 0.5);
    return MetricField<4>::closed("cone", [=](const X& x) { return scalar_times_id<4>(pow(r2_of<4>(x), beta)); })
        .with_domain(1e-12, 1e300)
        .set_radial();
  }
  if (name == "perturbed") {
    const double eps = param(p, "eps", 1e-2);
    const Vec<4> c(param(p, "cx", 0.15), param(p, "cy", -0.1), param(p, "cz", 0.05), param(p, "cw", 0.1));
    const double R = param(p, "support", 0.6);
    Mat<4> M;
    M << 1.0, 0.6, 0.0, -0.3,  //
        0.6, -1.0, 0.4, 0.0,   //
        0.0, 0.4, 0.5, 0.2,    //
        -0.3, 0.0, 0.2, -0.5;
    return MetricField<4>::closed("perturbed", [=](const X& x) {
      J4 d2(0.0, x(0).order());
      for (int i = 0; i < 4; ++i) d2 += (x(i) - c(i)) * (x(i) - c(i));
      const J4 psi = compact_bump<4>(d2 / (R * R));
      JetMat<double, 4> g;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = (i == j ? 1.0 : 0.0) + eps * M(i, j) * psi;
      return g;
    });
  }
  if (name == "anisotropic") {
    const double eps = param(p, "eps", 0.1);
    return MetricField<4>::closed("anisotropic", [=](const X& x) {
      JetMat<double, 4> g = scalar_times_id<4>(J4(1.0, x(0).order()));
      for (int i = 0; i < 4; ++i) g(i, i) += eps * x((i + 1) % 4) * x((i + 1) % 4);
      g(0, 1) = g(1, 0) = eps * 0.5 * x(2) * x(3);
      return g;
    });
  }
  throw std::invalid_argument("unknown 4D metric: " + name);
}

MetricField<2> catalog2(const std::string& name, const Params& p) {
  using J2 = Jet<double, 2>;
  using X = JetVec<double, 2>;
  if (name == "flat2")
    return MetricField<2>::closed("flat2", [](const X& x) { return scalar_times_id<2>(J2(1.0, x(0).order())); })
        .set_radial();
  if (name == "round_sphere2")
    return MetricField<2>::closed("round_sphere2",
                                  [](const X& x) {
                                    const J2 f = 1.0 + r2_of<2>(x);
                                    return scalar_times_id<2>(4.0 / (f * f));
                                  })
        .set_radial();
  if (name == "polar_singular") {
    const double n = param(p, "n", 2);
    return MetricField<2>::closed("polar_singular",
                                  [=](const X& x) { return scalar_times_id<2>(n * n * pow(r2_of<2>(x), n - 1)); })
        .with_domain(1e-12, 1e300)
        .set_radial();
  }
  if (name == "essential") {
    // |z|^{2 power} e^{2x/|z|^2}; power = -2 is the pullback of the flat metric by e^{1/z}
    const double q = param(p, "power", -2);
    return MetricField<2>::closed("essential",
                                  [q](const X& x) {
                                    const J2 r2 = r2_of<2>(x);
                                    return scalar_times_id<2>(exp(q * log(r2) + 2.0 * x(0) / r2));
                                  })
        .with_domain(1.0 / 256, 1e300);
  }
  if (name == "annulus_d") {
    return MetricField<2>::closed("annulus_d",
                                  [](const X& x) {
                                    const J2 r2 = r2_of<2>(x);
                                    const J2 r = sqrt(r2);
                                    const J2 rho = 0.5 + 0.5 * r;
                                    const J2 t = rho * rho / r2;  // tangential weight
                                    JetMat<double, 2> g;
                                    for (int i = 0; i < 2; ++i)
                                      for (int j = 0; j < 2; ++j) {
                                        const J2 xx = x(i) * x(j) / r2;
                                        g(i, j) = 0.25 * xx + t * ((i == j ? 1.0 : 0.0) - xx);
                                      }
                                    return g;
                                  })
        .with_domain(1e-12, 1e300)
        .set_radial();
  }
  throw std::invalid_argument("unknown 2D metric: " + name);
}

int catalog_dim(const std::string& name) {
  for (const char* n : {"flat4", "round_sphere4", "conformal_bump", "ale", "compactified", "cone", "perturbed",
                        "anisotropic"})
    if (name == n) return 4;
  for (const char* n : {"flat2", "round_sphere2", "polar_singular", "essential", "annulus_d"})
    if (name == n) return 2;
  return 0;
}

std::vector<std::string> catalog_names() {
  return {"flat2", "round_sphere2", "polar_singular", "essential",   "annulus_d",    "flat4", "round_sphere4",
          "conformal_bump", "ale",  "compactified",   "cone",        "perturbed",    "anisotropic"};
}

}  // namespace cgeom
