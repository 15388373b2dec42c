#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"
#include "cbamgrid/grid/timeutil.hpp"

namespace cbamgrid::grid {

// ---------------------------------------------------------------- timeutil

std::int64_t parse_iso8601(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char t = 0, z = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d%c", &y, &mo, &d, &t, &h, &mi, &sec, &z) != 8 ||
        (t != 'T' && t != ' ') || z != 'Z')
        raise(ErrorKind::Parse, "bad ISO-8601 UTC timestamp: '" + s + "'");
    std::tm tm = {};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = sec;
    std::time_t out = timegm(&tm);
    if (out == -1 && !(y == 1969 && mo == 12 && d == 31 && h == 23 && mi == 59 && sec == 59))
        raise(ErrorKind::Parse, "unrepresentable timestamp: '" + s + "'");
    return static_cast<std::int64_t>(out);
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm = {};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

// ------------------------------------------------------------------- graph

GridGraph::GridGraph(std::vector<std::string> nodes, std::vector<std::pair<int, int>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    const int n = static_cast<int>(nodes_.size());
    require(n > 0, ErrorKind::Config, "graph needs at least one node");
    std::set<std::string> seen;
    for (const auto& code : nodes_) {
        require(!code.empty(), ErrorKind::Schema, "empty node code");
        require(seen.insert(code).second, ErrorKind::Schema, "duplicate node '" + code + "'");
    }
    adjacency_ = ad::Tensor::identity(n);
    neighbors_.assign(n, {});
    std::set<std::pair<int, int>> dedup;
    for (auto [a, b] : edges_) {
        require(a >= 0 && a < n && b >= 0 && b < n, ErrorKind::Schema,
                "edge endpoint out of range");
        require(a != b, ErrorKind::Schema, "self-edges are implicit, not declared");
        auto key = std::minmax(a, b);
        if (!dedup.insert(key).second) continue;
        adjacency_.at(a, b) = 1.0;
        adjacency_.at(b, a) = 1.0;
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

GridGraph GridGraph::from_edge_list(const std::vector<std::string>& nodes,
                                    const std::vector<std::pair<std::string, std::string>>& edges) {
    GridGraph tmp(nodes, {});
    std::vector<std::pair<int, int>> idx_edges;
    for (const auto& [a, b] : edges) {
        if (a == b) continue;  // node-declaration row, no edge
        idx_edges.emplace_back(tmp.index_of(a), tmp.index_of(b));
    }
    return GridGraph(nodes, std::move(idx_edges));
}

int GridGraph::index_of(const std::string& code) const {
    for (int i = 0; i < node_count(); ++i)
        if (nodes_[i] == code) return i;
    raise(ErrorKind::Schema, "unknown node '" + code + "'");
}

bool GridGraph::has_node(const std::string& code) const {
    for (const auto& n : nodes_)
        if (n == code) return true;
    return false;
}

ad::Tensor GridGraph::row_normalized_weights() const {
    const int n = node_count();
    ad::Tensor w(n, n);
    for (int i = 0; i < n; ++i) {
        if (neighbors_[i].empty()) continue;
        const double share = 1.0 / static_cast<double>(neighbors_[i].size());
        for (int j : neighbors_[i]) w.at(i, j) = share;
    }
    return w;
}

// ------------------------------------------------------------------- panel

double HourlyPanel::base_feature(int node, std::size_t hour, int k) const {
    const NodeSeries& s = series[node];
    if (k == 0) return s.demand[hour];
    if (k <= kGenSourceCount) return s.gen[k - 1][hour];
    return s.net_imports[hour];
}

void HourlyPanel::validate() const {
    require(!timestamps.empty(), ErrorKind::Integrity, "panel has no rows");
    require(node_codes.size() == series.size(), ErrorKind::Contract,
            "node_codes/series size mismatch");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        const std::int64_t delta = timestamps[i] - timestamps[i - 1];
        if (delta == 0)
            raise(ErrorKind::Integrity, "duplicate timestamp at row " + std::to_string(i) + " (" +
                                            format_iso8601(timestamps[i]) + ")");
        if (delta != kSecondsPerHour)
            raise(ErrorKind::Integrity, "timestamp gap between " + format_iso8601(timestamps[i - 1]) +
                                            " and " + format_iso8601(timestamps[i]) +
                                            " (expected one hour)");
    }
    const std::size_t n = timestamps.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const NodeSeries& s = series[i];
        bool ok = s.demand.size() == n && s.net_imports.size() == n && s.price.size() == n &&
                  s.ci.size() == n;
        for (const auto& g : s.gen) ok = ok && g.size() == n;
        require(ok, ErrorKind::Integrity, "ragged series for node '" + node_codes[i] + "'");
        for (std::size_t h = 0; h < n; ++h) {
            if (s.ci[h] < 0.0)
                raise(ErrorKind::Integrity, "negative carbon intensity for '" + node_codes[i] +
                                                "' at " + format_iso8601(timestamps[h]));
            for (const auto& g : s.gen)
                if (g[h] < 0.0)
                    raise(ErrorKind::Integrity, "negative generation for '" + node_codes[i] +
                                                    "' at " + format_iso8601(timestamps[h]));
        }
    }
}

SplitSpec SplitSpec::from_fractions(double train, double val, double test, std::size_t n_hours) {
    for (double f : {train, val, test})
        require(f >= 0.0, ErrorKind::Config, "split fraction must be non-negative");
    require(std::fabs(train + val + test - 1.0) <= 1e-9, ErrorKind::Config,
            "split fractions must sum to 1");
    SplitSpec s;
    s.train_fraction = train;
    s.val_fraction = val;
    s.test_fraction = test;
    s.total = n_hours;
    s.train_end = static_cast<std::size_t>(std::floor(train * static_cast<double>(n_hours)));
    s.val_end = s.train_end + static_cast<std::size_t>(std::floor(val * static_cast<double>(n_hours)));
    // remainder rows fall into the test segment
    return s;
}

SplitViews chronological_split(const HourlyPanel& panel, const SplitSpec& spec) {
    require(spec.total == panel.hours(), ErrorKind::Contract,
            "split spec computed for a different panel length");
    SplitViews v;
    v.train = {&panel, 0, spec.train_end};
    v.val = {&panel, spec.train_end, spec.val_end - spec.train_end};
    v.test = {&panel, spec.val_end, panel.hours() - spec.val_end};
    return v;
}

}  // namespace cbamgrid::grid
