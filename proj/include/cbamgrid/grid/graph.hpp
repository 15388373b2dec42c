#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"

namespace cbamgrid::grid {

// Interconnection graph: country codes as nodes, undirected edges between
// coupled markets. The adjacency matrix carries self-loops on the diagonal
// so every node attends to itself during aggregation.
class GridGraph {
public:
    GridGraph() = default;  // empty graph; populate via the real constructor
    GridGraph(std::vector<std::string> nodes, std::vector<std::pair<int, int>> edges);

    static GridGraph from_edge_list(const std::vector<std::string>& nodes,
                                    const std::vector<std::pair<std::string, std::string>>& edges);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    int index_of(const std::string& code) const;  // Schema error if unknown
    bool has_node(const std::string& code) const;

    // |V| x |V|, symmetric, ones on the diagonal.
    const ad::Tensor& adjacency() const { return adjacency_; }

    // Neighbor indices excluding the node itself.
    const std::vector<int>& neighbors(int node) const { return neighbors_[node]; }

    // Row-normalized adjacency without self-loops (spatial-econometrics
    // convention); rows with no neighbors are all zero.
    ad::Tensor row_normalized_weights() const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::pair<int, int>> edges_;
    ad::Tensor adjacency_;
    std::vector<std::vector<int>> neighbors_;
};

}  // namespace cbamgrid::grid
