#pragma once

#include <cmath>
#include <stdexcept>

#include "passlens/geometry.hpp"
#include "passlens/types.hpp"

namespace passlens {

struct DensityParams {
  double sigma = 10.0;      // kernel bandwidth in metres
  double rho_floor = 1e-6;  // keeps space value finite far from everyone

  bool valid() const { return sigma > 0.0 && rho_floor > 0.0; }
};

/// Number of defenders whose position along the attacking axis lies strictly
/// beyond the pass origin and at most at the reception point. Backward and
/// square passes score 0 by construction.
inline int line_bypass_score(const PassEvent& p) {
  int count = 0;
  for (const Point2D& d : p.snapshot.defenders) {
    if (p.start.y < d.y && d.y <= p.end.y) ++count;
  }
  return count;
}

/// Gaussian-kernel defender density at a point, floored away from zero.
inline double defensive_density(const Point2D& x, const DefensiveSnapshot& snapshot,
                                const DensityParams& params) {
  if (snapshot.n() == 0) throw std::invalid_argument("defensive_density: empty snapshot");
  const double inv_two_sigma_sq = 1.0 / (2.0 * params.sigma * params.sigma);
  double rho = 0.0;
  for (const Point2D& d : snapshot.defenders) {
    rho += std::exp(-squared_norm(x - d) * inv_two_sigma_sq);
  }
  return rho < params.rho_floor ? params.rho_floor : rho;
}

/// Change in space value (inverse defender density) between origin and
/// reception point. Positive when the ball arrives somewhere emptier.
inline double space_gain(const PassEvent& p, const DensityParams& params) {
  const double s_start = 1.0 / defensive_density(p.start, p.snapshot, params);
  const double s_end = 1.0 / defensive_density(p.end, p.snapshot, params);
  return s_end - s_start;
}

/// Change in distance from the defending side's centroid. Positive values
/// mean the ball moved away from the defensive block.
inline double structural_disruption(const PassEvent& p) {
  if (p.snapshot.n() == 0) throw std::invalid_argument("structural_disruption: empty snapshot");
  return distance(p.end, p.snapshot.centroid) - distance(p.start, p.snapshot.centroid);
}

inline StructuralFeatures compute_features(const PassEvent& p, const DensityParams& params) {
  StructuralFeatures f;
  f.lbs = line_bypass_score(p);
  f.sgm = space_gain(p, params);
  f.sdi = structural_disruption(p);
  return f;
}

}  // namespace passlens
