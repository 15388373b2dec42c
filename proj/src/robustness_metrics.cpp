#include "cbamgrid/robustness/metrics.hpp"

#include <cmath>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/stats.hpp"

namespace cbamgrid::robustness {

namespace {

int tri_sign(double v, double tol) {
    if (std::fabs(v) < tol) return 0;
    return v > 0.0 ? 1 : -1;
}

}  // namespace

double sign_agree(std::span<const double> a, std::span<const double> b, double tol) {
    require(a.size() == b.size() && !a.empty(), ErrorKind::Contract,
            "sign_agree: need equal non-empty vectors");
    std::size_t match = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (tri_sign(a[i], tol) == tri_sign(b[i], tol)) ++match;
    return static_cast<double>(match) / static_cast<double>(a.size());
}

double spearman(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size() && a.size() >= 2, ErrorKind::Contract,
            "spearman: need equal vectors of length >= 2");
    const std::vector<double> ra = stats::average_ranks(a);
    const std::vector<double> rb = stats::average_ranks(b);
    return stats::pearson(ra, rb);
}

double attenuation(std::span<const double> placebo, std::span<const double> reference, double tol) {
    require(placebo.size() == reference.size() && !reference.empty(), ErrorKind::Contract,
            "attenuation: need equal non-empty vectors");
    double num = 0.0, den = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        num += std::fabs(placebo[i]);
        den += std::fabs(reference[i]);
        if (std::fabs(reference[i]) >= tol) any = true;
    }
    require(any, ErrorKind::Contract, "attenuation: reference effect is entirely below tolerance");
    return num / den;
}

RobustnessMetrics compare_impacts(std::span<const double> candidate,
                                  std::span<const double> reference, bool with_attenuation) {
    RobustnessMetrics m;
    m.sign_agree = sign_agree(candidate, reference);
    m.rank_corr = spearman(candidate, reference);
    if (with_attenuation) m.attenuation = attenuation(candidate, reference);
    return m;
}

}  // namespace cbamgrid::robustness
