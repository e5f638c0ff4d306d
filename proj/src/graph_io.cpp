#include "polyforest/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "polyforest/errors.hpp"

namespace polyforest {

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int parse_node(const std::string& tok, int d, int line) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected node index, got '" + tok + "'", line);
    }
    if (pos != tok.size()) throw ParseError("trailing characters in node index '" + tok + "'", line);
    if (v < 0 || v >= d)
        throw ParseError("node index " + std::to_string(v) + " outside [0, " +
                             std::to_string(d) + ")",
                         line);
    return v;
}

}  // namespace

Dag ParsedGraph::to_dag() const {
    if (!undirected.empty())
        throw Error("graph contains undirected edges; expected a DAG");
    return Dag(d, directed);
}

Cpdag ParsedGraph::to_cpdag() const { return Cpdag(d, directed, undirected); }

ParsedGraph parse_graph(std::istream& in) {
    ParsedGraph g;
    std::string raw;
    int line_no = 0;
    bool have_d = false;
    std::set<Pair> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = strip(line);
        if (line.empty()) continue;
        if (!have_d) {
            // first content line must be d=<int>
            std::string nospace;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) nospace += c;
            if (nospace.rfind("d=", 0) != 0)
                throw ParseError("expected 'd=<int>' header, got '" + line + "'", line_no);
            try {
                g.d = std::stoi(nospace.substr(2));
            } catch (const std::exception&) {
                throw ParseError("invalid node count '" + nospace.substr(2) + "'", line_no);
            }
            if (g.d < 1) throw ParseError("node count must be >= 1", line_no);
            have_d = true;
            continue;
        }
        bool directed = true;
        size_t arrow = line.find("->");
        if (arrow == std::string::npos) {
            arrow = line.find("--");
            directed = false;
        }
        if (arrow == std::string::npos)
            throw ParseError("expected 'j -> k' or 'j -- k', got '" + line + "'", line_no);
        int a = parse_node(strip(line.substr(0, arrow)), g.d, line_no);
        int b = parse_node(strip(line.substr(arrow + 2)), g.d, line_no);
        if (a == b) throw ParseError("self-loop on node " + std::to_string(a), line_no);
        if (!seen.insert(make_pair_sorted(a, b)).second)
            throw ParseError("duplicate edge between " + std::to_string(a) + " and " +
                                 std::to_string(b),
                             line_no);
        if (directed)
            g.directed.emplace_back(a, b);
        else
            g.undirected.emplace_back(make_pair_sorted(a, b));
    }
    if (!have_d) throw ParseError("missing 'd=<int>' header", line_no == 0 ? 1 : line_no);
    return g;
}

ParsedGraph parse_graph_string(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

ParsedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path);
    return parse_graph(in);
}

std::string write_graph(const Dag& g) {
    std::ostringstream out;
    out << "d=" << g.node_count() << "\n";
    for (const auto& [p, c] : g.edges()) out << p << " -> " << c << "\n";
    return out.str();
}

std::string write_graph(const Cpdag& g) {
    std::ostringstream out;
    out << "d=" << g.node_count() << "\n";
    for (const auto& [p, c] : g.directed()) out << p << " -> " << c << "\n";
    for (const auto& [a, b] : g.undirected()) out << a << " -- " << b << "\n";
    return out.str();
}

namespace {
void save_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}
}  // namespace

void save_graph(const Dag& g, const std::string& path) { save_text(write_graph(g), path); }
void save_graph(const Cpdag& g, const std::string& path) { save_text(write_graph(g), path); }

}  // namespace polyforest
