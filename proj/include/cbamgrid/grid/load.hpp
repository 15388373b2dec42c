#pragma once

#include <string>
#include <utility>

#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"

namespace cbamgrid::grid {

// Graph file: CSV with header `from,to`, one interconnection per row.
// A row with identical endpoints declares an isolated node. Node order is
// first appearance in the file.
GridGraph load_graph(const std::string& path);
void save_graph(const GridGraph& graph, const std::string& path);

// Panel file: one row per hourly timestamp, columns `<node>_<field>` for
// every node in the graph. Validates the hourly axis and data invariants.
HourlyPanel load_panel_file(const std::string& path, const GridGraph& graph);
void save_panel(const HourlyPanel& panel, const std::string& path);

std::pair<GridGraph, HourlyPanel> load_panel(const std::string& graph_path,
                                             const std::string& panel_path);

}  // namespace cbamgrid::grid
