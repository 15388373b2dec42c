#include "cbamgrid/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "cbamgrid/csv.hpp"
#include "cbamgrid/errors.hpp"

namespace cbamgrid::scenario {

void ScenarioConfig::validate() const {
    require(std::isfinite(intensity) && intensity >= 0.0 && intensity <= 1.0, ErrorKind::Config,
            "scenario '" + label + "': intensity must lie in [0, 1]");
    require(std::isfinite(threshold) && threshold >= 0.0, ErrorKind::Config,
            "scenario '" + label + "': threshold must be non-negative");
    require(std::isfinite(ets_price) && ets_price >= 0.0, ErrorKind::Config,
            "scenario '" + label + "': ETS price must be non-negative");
}

double cbam_cost(double ci, const ScenarioConfig& scenario) {
    require(ci >= 0.0, ErrorKind::Contract, "cbam_cost: carbon intensity must be non-negative");
    return std::max(0.0, ci - scenario.threshold) * scenario.intensity * scenario.ets_price / 1000.0;
}

double intensity_from_percent(int percent) {
    require(percent >= 0 && percent <= 100, ErrorKind::Config,
            "intensity percent outside [0, 100]: " + std::to_string(percent));
    return static_cast<double>(percent) / 100.0;
}

ad::Tensor scenario_costs(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                          const ScenarioConfig& scenario) {
    scenario.validate();
    const int n = panel.node_count();
    std::vector<bool> covered(n, scenario.nodes.empty());
    for (const auto& code : scenario.nodes) covered[graph.index_of(code)] = true;

    ad::Tensor costs(static_cast<int>(panel.hours()), n);
    for (int i = 0; i < n; ++i) {
        if (!covered[i]) continue;
        const auto& ci = panel.series[i].ci;
        for (std::size_t h = 0; h < panel.hours(); ++h)
            costs.at(static_cast<int>(h), i) = cbam_cost(ci[h], scenario);
    }
    return costs;
}

ad::Tensor schedule_costs(const grid::HourlyPanel& panel, const grid::PolicySchedule& schedule) {
    require(schedule.active(), ErrorKind::Contract, "schedule_costs: inactive schedule");
    require(schedule.intensity.rows() == static_cast<int>(panel.hours()) &&
                schedule.intensity.cols() == panel.node_count(),
            ErrorKind::Contract, "schedule_costs: schedule shape does not match the panel");
    const int n = panel.node_count();
    ad::Tensor costs(static_cast<int>(panel.hours()), n);
    ScenarioConfig sc;
    sc.threshold = schedule.threshold;
    sc.ets_price = schedule.ets_price;
    for (std::size_t h = 0; h < panel.hours(); ++h) {
        for (int i = 0; i < n; ++i) {
            sc.intensity = schedule.intensity.at(static_cast<int>(h), i);
            costs.at(static_cast<int>(h), i) = cbam_cost(panel.series[i].ci[h], sc);
        }
    }
    return costs;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path, const grid::GridGraph& graph) {
    csv::Table t = csv::read_file(path);
    const std::size_t c_label = t.column("label");
    const std::size_t c_int = t.column("intensity");
    const std::size_t c_thr = t.column("threshold");
    const std::size_t c_ets = t.column("ets_price");
    const bool has_nodes = t.has_column("nodes");
    const std::size_t c_nodes = has_nodes ? t.column("nodes") : 0;

    std::vector<ScenarioConfig> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string ctx = path + " row " + std::to_string(r + 2);
        ScenarioConfig sc;
        sc.label = t.rows[r][c_label];
        sc.intensity = csv::parse_double(t.rows[r][c_int], ctx);
        sc.threshold = csv::parse_double(t.rows[r][c_thr], ctx);
        sc.ets_price = csv::parse_double(t.rows[r][c_ets], ctx);
        if (has_nodes && !t.rows[r][c_nodes].empty()) {
            std::string cur;
            for (char ch : t.rows[r][c_nodes] + ";") {
                if (ch == ';') {
                    if (!cur.empty()) {
                        if (!graph.has_node(cur))
                            raise(ErrorKind::Schema, ctx + ": unknown node '" + cur + "'");
                        sc.nodes.push_back(cur);
                        cur.clear();
                    }
                } else {
                    cur.push_back(ch);
                }
            }
        }
        sc.validate();
        out.push_back(std::move(sc));
    }
    require(!out.empty(), ErrorKind::Schema, path + ": no scenarios declared");
    return out;
}

void save_scenarios(const std::vector<ScenarioConfig>& scenarios, const std::string& path) {
    csv::Table t;
    t.header = {"label", "intensity", "threshold", "ets_price", "nodes"};
    for (const auto& sc : scenarios) {
        std::string nodes;
        for (std::size_t i = 0; i < sc.nodes.size(); ++i) nodes += (i ? ";" : "") + sc.nodes[i];
        t.rows.push_back({sc.label, csv::format_double(sc.intensity), csv::format_double(sc.threshold),
                          csv::format_double(sc.ets_price), nodes});
    }
    csv::write_file(path, t);
}

}  // namespace cbamgrid::scenario
