#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "passlens/types.hpp"

namespace passlens {

/// Corpus mean and population standard deviation per raw metric. Frozen after
/// fitting so a stored model scores new passes on the training scale.
struct NormStats {
  double mu_lbs = 0.0, mu_sgm = 0.0, mu_sdi = 0.0;
  double sd_lbs = 0.0, sd_sgm = 0.0, sd_sdi = 0.0;
  std::size_t n_fit = 0;

  bool valid() const { return n_fit >= 2 && sd_lbs >= 0.0 && sd_sgm >= 0.0 && sd_sdi >= 0.0; }
};

inline NormStats fit_norm_stats(const std::vector<StructuralFeatures>& fs) {
  if (fs.size() < 2) throw std::invalid_argument("fit_norm_stats: need at least 2 passes");
  NormStats s;
  s.n_fit = fs.size();
  const double n = static_cast<double>(fs.size());
  for (const StructuralFeatures& f : fs) {
    s.mu_lbs += f.lbs;
    s.mu_sgm += f.sgm;
    s.mu_sdi += f.sdi;
  }
  s.mu_lbs /= n;
  s.mu_sgm /= n;
  s.mu_sdi /= n;
  double v_lbs = 0.0, v_sgm = 0.0, v_sdi = 0.0;
  for (const StructuralFeatures& f : fs) {
    v_lbs += (f.lbs - s.mu_lbs) * (f.lbs - s.mu_lbs);
    v_sgm += (f.sgm - s.mu_sgm) * (f.sgm - s.mu_sgm);
    v_sdi += (f.sdi - s.mu_sdi) * (f.sdi - s.mu_sdi);
  }
  s.sd_lbs = std::sqrt(v_lbs / n);
  s.sd_sgm = std::sqrt(v_sgm / n);
  s.sd_sdi = std::sqrt(v_sdi / n);
  return s;
}

/// z-score with the convention that a constant column maps to 0.
inline double zscore(double value, double mu, double sd) {
  return sd == 0.0 ? 0.0 : (value - mu) / sd;
}

inline void normalize(StructuralFeatures& f, const NormStats& s) {
  f.z_lbs = zscore(f.lbs, s.mu_lbs, s.sd_lbs);
  f.z_sgm = zscore(f.sgm, s.mu_sgm, s.sd_sgm);
  f.z_sdi = zscore(f.sdi, s.mu_sdi, s.sd_sdi);
}

inline double tactical_impact_value(const StructuralFeatures& f, const Weights& w) {
  return w.w_lbs * f.z_lbs + w.w_sgm * f.z_sgm + w.w_sdi * f.z_sdi;
}

/// Fills z columns and the impact value for a whole corpus in place.
inline void apply_normalization(std::vector<StructuralFeatures>& fs, const NormStats& s,
                                const Weights& w) {
  if (!w.valid()) throw std::invalid_argument("apply_normalization: weights must be non-negative and sum to 1");
  for (StructuralFeatures& f : fs) {
    normalize(f, s);
    f.tiv = tactical_impact_value(f, w);
  }
}

}  // namespace passlens
