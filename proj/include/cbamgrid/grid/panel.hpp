#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cbamgrid::grid {

// Generation source categories, in column order.
inline constexpr std::array<const char*, 7> kGenSources = {
    "coal", "gas", "nuclear", "hydro", "wind", "solar", "other"};
inline constexpr int kGenSourceCount = 7;

// Base per-node feature fields: demand, one per generation source, net
// imports. Price and carbon intensity are targets, not base features.
inline constexpr int kBaseFeatureCount = 2 + kGenSourceCount;

// Per-node hourly series. All vectors share the panel's timestamp axis.
struct NodeSeries {
    std::vector<double> demand;                              // MW
    std::array<std::vector<double>, kGenSourceCount> gen;    // MW per source
    std::vector<double> net_imports;                         // MW
    std::vector<double> price;                               // EUR/MWh
    std::vector<double> ci;                                  // kg CO2/MWh
};

// Hourly panel over a shared, strictly increasing, gap-free timestamp axis.
// Immutable after construction/validation.
struct HourlyPanel {
    std::vector<std::int64_t> timestamps;  // epoch seconds, UTC, hourly
    std::vector<std::string> node_codes;
    std::vector<NodeSeries> series;  // one per node, same order as node_codes

    std::size_t hours() const { return timestamps.size(); }
    int node_count() const { return static_cast<int>(node_codes.size()); }

    // Base feature k of a node at an hour; k indexes demand, gen sources,
    // net imports in declared order.
    double base_feature(int node, std::size_t hour, int k) const;

    // Raises Integrity/Contract errors on axis gaps, duplicates, negative
    // generation or CI, or ragged series lengths.
    void validate() const;
};

// Contiguous view over a panel segment [begin, begin + length).
struct PanelView {
    const HourlyPanel* panel = nullptr;
    std::size_t begin = 0;
    std::size_t length = 0;

    bool empty() const { return length == 0; }
    std::size_t end() const { return begin + length; }
};

// Chronological split boundaries. Fractions must be non-negative and sum
// to 1 within 1e-9; floor rule with the remainder assigned to test.
struct SplitSpec {
    double train_fraction = 0.7;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::size_t train_end = 0;  // index one past the train segment
    std::size_t val_end = 0;    // index one past the validation segment
    std::size_t total = 0;

    static SplitSpec from_fractions(double train, double val, double test, std::size_t n_hours);
};

struct SplitViews {
    PanelView train;
    PanelView val;
    PanelView test;
};

SplitViews chronological_split(const HourlyPanel& panel, const SplitSpec& spec);

inline SplitViews chronological_split(const HourlyPanel& panel, double train, double val, double test) {
    return chronological_split(panel, SplitSpec::from_fractions(train, val, test, panel.hours()));
}

}  // namespace cbamgrid::grid
