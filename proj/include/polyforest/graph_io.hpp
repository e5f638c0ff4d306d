#pragma once

#include <iosfwd>
#include <string>

#include "polyforest/graph.hpp"

namespace polyforest {

// Text grammar: first content line `d=<int>`, then one edge per line,
// `j -> k` (directed) or `j -- k` (undirected). `#` starts a comment,
// whitespace is ignored. DAG files may contain only `->` lines.
struct ParsedGraph {
    int d = 0;
    std::vector<Edge> directed;
    std::vector<Pair> undirected;

    bool is_pure_dag() const { return undirected.empty(); }
    Dag to_dag() const;      // throws if any undirected edge is present
    Cpdag to_cpdag() const;  // accepts mixed marks
};

ParsedGraph parse_graph(std::istream& in);
ParsedGraph parse_graph_string(const std::string& text);
ParsedGraph load_graph(const std::string& path);

std::string write_graph(const Dag& g);
std::string write_graph(const Cpdag& g);
void save_graph(const Dag& g, const std::string& path);
void save_graph(const Cpdag& g, const std::string& path);

}  // namespace polyforest
