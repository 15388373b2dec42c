#pragma once

#include <span>
#include <vector>

namespace cbamgrid::robustness {

// Fraction of indices with matching tri-valued sign. Entries with magnitude
// below `tol` count as zero; zeros match only zeros.
double sign_agree(std::span<const double> a, std::span<const double> b, double tol = 1e-6);

// Spearman rank correlation: Pearson of average ranks (ties averaged).
double spearman(std::span<const double> a, std::span<const double> b);

// mean |placebo| / mean |reference|. Raises Contract when the reference is
// entirely below tolerance.
double attenuation(std::span<const double> placebo, std::span<const double> reference,
                   double tol = 1e-6);

struct RobustnessMetrics {
    double sign_agree = 0.0;
    double rank_corr = 0.0;
    double attenuation = -1.0;  // negative = not applicable (sensitivity rows)
};

RobustnessMetrics compare_impacts(std::span<const double> candidate,
                                  std::span<const double> reference, bool with_attenuation);

}  // namespace cbamgrid::robustness
