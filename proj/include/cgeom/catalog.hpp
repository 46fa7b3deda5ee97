#pragma once

#include <map>
#include <string>
#include <vector>

#include "cgeom/metric.hpp"

namespace cgeom {

using Params = std::map<std::string, std::string>;

double param(const Params& p, const std::string& key, double fallback);
std::string param_str(const Params& p, const std::string& key, const std::string& fallback);

// Radial conformal exponent phi(|x|) used by conformal_bump; smooth at 0 when center = 0.
template <int D>
Jet<double, D> bump_profile(const JetVec<double, D>& x, double amp, double center, double width,
                            const std::string& profile);

// Named metrics. 4D: flat4, round_sphere4, conformal_bump, ale, compactified, cone,
// perturbed, anisotropic. 2D: flat2, round_sphere2, polar_singular, essential, annulus_d.
MetricField<4> catalog4(const std::string& name, const Params& p = {});
MetricField<2> catalog2(const std::string& name, const Params& p = {});
int catalog_dim(const std::string& name);  // 0 if unknown
std::vector<std::string> catalog_names();

}  // namespace cgeom
