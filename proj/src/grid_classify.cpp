#include "cbamgrid/grid/classify.hpp"

#include "cbamgrid/errors.hpp"

namespace cbamgrid::grid {

CarbonClass classify_ci(double mean_ci) {
    if (mean_ci < kLowCarbonThreshold) return CarbonClass::Low;
    if (mean_ci > kHighCarbonThreshold) return CarbonClass::High;
    return CarbonClass::Medium;
}

std::vector<CarbonClass> classify_nodes(const HourlyPanel& panel, const PanelView& train) {
    require(train.panel == &panel, ErrorKind::Contract, "classify_nodes: view of a different panel");
    require(!train.empty(), ErrorKind::Contract, "classify_nodes: empty training segment");
    std::vector<CarbonClass> out;
    out.reserve(panel.series.size());
    for (const auto& s : panel.series) {
        double sum = 0.0;
        for (std::size_t h = train.begin; h < train.end(); ++h) sum += s.ci[h];
        out.push_back(classify_ci(sum / static_cast<double>(train.length)));
    }
    return out;
}

}  // namespace cbamgrid::grid
