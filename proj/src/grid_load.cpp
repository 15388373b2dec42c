#include "cbamgrid/grid/load.hpp"

#include <vector>

#include "cbamgrid/csv.hpp"
#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/timeutil.hpp"

namespace cbamgrid::grid {

GridGraph load_graph(const std::string& path) {
    csv::Table t = csv::read_file(path);
    if (t.header.size() != 2 || t.header[0] != "from" || t.header[1] != "to")
        raise(ErrorKind::Schema, path + ": expected header `from,to`");
    std::vector<std::string> nodes;
    auto declare = [&](const std::string& code) {
        for (const auto& n : nodes)
            if (n == code) return;
        nodes.push_back(code);
    };
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& row : t.rows) {
        declare(row[0]);
        declare(row[1]);
        edges.emplace_back(row[0], row[1]);
    }
    return GridGraph::from_edge_list(nodes, edges);
}

void save_graph(const GridGraph& graph, const std::string& path) {
    csv::Table t;
    t.header = {"from", "to"};
    // declaration rows first so loading preserves the node order exactly
    for (const auto& code : graph.nodes()) t.rows.push_back({code, code});
    for (auto [a, b] : graph.edges()) t.rows.push_back({graph.nodes()[a], graph.nodes()[b]});
    csv::write_file(path, t);
}

namespace {

const std::vector<std::string> node_fields() {
    std::vector<std::string> f = {"demand"};
    for (const char* g : kGenSources) f.push_back(std::string("gen_") + g);
    f.push_back("net_imports");
    f.push_back("price");
    f.push_back("ci");
    return f;
}

}  // namespace

HourlyPanel load_panel_file(const std::string& path, const GridGraph& graph) {
    csv::Table t = csv::read_file(path);
    const std::size_t ts_col = t.column("timestamp");

    const auto fields = node_fields();
    const int n = graph.node_count();
    // column index per (node, field)
    std::vector<std::vector<std::size_t>> cols(n);
    for (int i = 0; i < n; ++i) {
        cols[i].reserve(fields.size());
        for (const auto& f : fields) {
            const std::string name = graph.nodes()[i] + "_" + f;
            if (!t.has_column(name))
                raise(ErrorKind::Schema, path + ": missing column '" + name + "' for node '" +
                                             graph.nodes()[i] + "'");
            cols[i].push_back(t.column(name));
        }
    }

    HourlyPanel p;
    p.node_codes = graph.nodes();
    p.series.resize(n);
    const std::size_t rows = t.rows.size();
    p.timestamps.reserve(rows);
    for (int i = 0; i < n; ++i) {
        p.series[i].demand.reserve(rows);
        for (auto& g : p.series[i].gen) g.reserve(rows);
        p.series[i].net_imports.reserve(rows);
        p.series[i].price.reserve(rows);
        p.series[i].ci.reserve(rows);
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = t.rows[r];
        const std::string ctx = path + " row " + std::to_string(r + 2);
        p.timestamps.push_back(parse_iso8601(row[ts_col]));
        for (int i = 0; i < n; ++i) {
            NodeSeries& s = p.series[i];
            std::size_t k = 0;
            s.demand.push_back(csv::parse_double(row[cols[i][k++]], ctx));
            for (auto& g : s.gen) g.push_back(csv::parse_double(row[cols[i][k++]], ctx));
            s.net_imports.push_back(csv::parse_double(row[cols[i][k++]], ctx));
            s.price.push_back(csv::parse_double(row[cols[i][k++]], ctx));
            s.ci.push_back(csv::parse_double(row[cols[i][k++]], ctx));
        }
    }
    p.validate();
    return p;
}

void save_panel(const HourlyPanel& panel, const std::string& path) {
    csv::Table t;
    t.header = {"timestamp"};
    const auto fields = node_fields();
    for (const auto& code : panel.node_codes)
        for (const auto& f : fields) t.header.push_back(code + "_" + f);

    t.rows.reserve(panel.hours());
    for (std::size_t h = 0; h < panel.hours(); ++h) {
        std::vector<std::string> row;
        row.reserve(t.header.size());
        row.push_back(format_iso8601(panel.timestamps[h]));
        for (const auto& s : panel.series) {
            row.push_back(csv::format_double(s.demand[h]));
            for (const auto& g : s.gen) row.push_back(csv::format_double(g[h]));
            row.push_back(csv::format_double(s.net_imports[h]));
            row.push_back(csv::format_double(s.price[h]));
            row.push_back(csv::format_double(s.ci[h]));
        }
        t.rows.push_back(std::move(row));
    }
    csv::write_file(path, t);
}

std::pair<GridGraph, HourlyPanel> load_panel(const std::string& graph_path,
                                             const std::string& panel_path) {
    GridGraph graph = load_graph(graph_path);
    HourlyPanel panel = load_panel_file(panel_path, graph);
    return {std::move(graph), std::move(panel)};
}

}  // namespace cbamgrid::grid
