#pragma once

#include <string>
#include <vector>

#include "cbamgrid/grid/panel.hpp"

namespace cbamgrid::grid {

enum class CarbonClass { Low, Medium, High };

inline const char* to_string(CarbonClass c) {
    switch (c) {
        case CarbonClass::Low: return "low";
        case CarbonClass::Medium: return "medium";
        case CarbonClass::High: return "high";
    }
    return "?";
}

// Classification thresholds on mean generation-based CI over the training
// split: Low < 50, Medium in [50, 130], High > 130 kg CO2/MWh.
inline constexpr double kLowCarbonThreshold = 50.0;
inline constexpr double kHighCarbonThreshold = 130.0;

CarbonClass classify_ci(double mean_ci);

// Per-node class from the mean CI over the given (training) segment.
std::vector<CarbonClass> classify_nodes(const HourlyPanel& panel, const PanelView& train);

}  // namespace cbamgrid::grid
