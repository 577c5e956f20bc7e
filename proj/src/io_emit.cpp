#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "crunch/error.hpp"
#include "crunch/io.hpp"

namespace crunch {
namespace {

// Fixed two-decimal formatting for canvas coordinates: compact and
// byte-stable across platforms.
std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Shortest-ish round-trippable numbers for weights and branch lengths.
std::string fmt_num(double v) {
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

constexpr double kCanvas = 800.0;

std::string svg_open(double width, double height) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width)
      << "\" height=\"" << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width)
      << " " << fmt2(height) << "\">\n";
  return out.str();
}

// Positions for a ring of labeled nodes, used by both graph-shaped emitters.
std::vector<std::pair<double, double>> circle_layout(std::size_t n) {
  std::vector<std::pair<double, double>> pos(n);
  const double cx = kCanvas / 2.0;
  const double cy = kCanvas / 2.0;
  const double radius = n > 1 ? 320.0 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(n) -
                         std::numbers::pi / 2.0;
    pos[i] = {cx + radius * std::cos(angle), cy + radius * std::sin(angle)};
  }
  return pos;
}

void svg_node(std::ostringstream& out, double x, double y,
              const std::string& label) {
  out << "  <circle cx=\"" << fmt2(x) << "\" cy=\"" << fmt2(y)
      << "\" r=\"4\" fill=\"#31414e\"/>\n"
      << "  <text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y - 9)
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">"
      << xml_escape(label) << "</text>\n";
}

}  // namespace

std::string emit_svg(const RegionSet& regions) {
  regions.validate();
  Bounds b = regions.bounds();
  const double pad = 0.05 * std::max(b.width(), b.height());
  b.xmin -= pad;
  b.xmax += pad;
  b.ymin -= pad;
  b.ymax += pad;
  const double scale = kCanvas / b.width();
  const double height = b.height() * scale;
  const auto mx = [&](double x) { return (x - b.xmin) * scale; };
  const auto my = [&](double y) { return (b.ymax - y) * scale; };

  std::ostringstream out;
  out << svg_open(kCanvas, height);
  out << "  <rect width=\"" << fmt2(kCanvas) << "\" height=\"" << fmt2(height)
      << "\" fill=\"#f5f8fa\"/>\n";
  for (const Region& region : regions.regions) {
    out << "  <path d=\"";
    for (const Ring& ring : region.rings) {
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        out << (i == 0 ? "M" : "L") << fmt2(mx(ring[i].x())) << " "
            << fmt2(my(ring[i].y()));
      }
      out << "Z";
    }
    out << "\" fill=\"#9ecae1\" fill-rule=\"evenodd\" stroke=\"#31414e\" "
           "stroke-width=\"1\"><title>"
        << xml_escape(region.id) << ": " << fmt_num(region.statistic)
        << "</title></path>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string emit_svg(const Tree& tree) {
  require(!tree.labels.empty(), "cannot render an empty tree");
  tree.validate();
  const auto pos = circle_layout(tree.labels.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tree.labels.size(); ++i) index[tree.labels[i]] = i;

  std::ostringstream out;
  out << svg_open(kCanvas, kCanvas);
  for (const Tree::Edge& e : tree.edges) {
    const auto& pa = pos[index.at(e.a)];
    const auto& pb = pos[index.at(e.b)];
    out << "  <line x1=\"" << fmt2(pa.first) << "\" y1=\"" << fmt2(pa.second)
        << "\" x2=\"" << fmt2(pb.first) << "\" y2=\"" << fmt2(pb.second)
        << "\" stroke=\"#555555\" stroke-width=\"1.5\"><title>"
        << xml_escape(e.a) << " -- " << xml_escape(e.b) << ": "
        << fmt_num(e.weight) << "</title></line>\n";
  }
  for (std::size_t i = 0; i < tree.labels.size(); ++i) {
    svg_node(out, pos[i].first, pos[i].second, tree.labels[i]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string emit_svg(const SignedGraph& graph) {
  require(!graph.actors.empty(), "cannot render an empty graph");
  graph.validate();
  const auto pos = circle_layout(graph.actors.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph.actors.size(); ++i) {
    index[graph.actors[i]] = i;
  }

  std::ostringstream out;
  out << svg_open(kCanvas, kCanvas);
  for (const SignedGraph::Edge& e : graph.edges) {
    const auto& pa = pos[index.at(e.a)];
    const auto& pb = pos[index.at(e.b)];
    // Sign-color convention: blue positive, red negative, black neutral.
    const char* color = e.sign > 0 ? "blue" : (e.sign < 0 ? "red" : "black");
    out << "  <line x1=\"" << fmt2(pa.first) << "\" y1=\"" << fmt2(pa.second)
        << "\" x2=\"" << fmt2(pb.first) << "\" y2=\"" << fmt2(pb.second)
        << "\" stroke=\"" << color << "\" stroke-width=\""
        << fmt2(0.75 + 2.0 * std::abs(e.weight)) << "\"><title>"
        << xml_escape(e.a) << " -- " << xml_escape(e.b) << ": "
        << fmt_num(e.weight) << "</title></line>\n";
  }
  for (std::size_t i = 0; i < graph.actors.size(); ++i) {
    svg_node(out, pos[i].first, pos[i].second, graph.actors[i]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string emit_tree(const Tree& tree, TreeFormat format) {
  require(!tree.labels.empty(), "cannot serialize an empty tree");
  tree.validate();

  if (format == TreeFormat::dot) {
    std::ostringstream out;
    out << "graph taxonomy {\n";
    for (const std::string& label : tree.labels) {
      out << "  \"" << dot_escape(label) << "\";\n";
    }
    for (const Tree::Edge& e : tree.edges) {
      out << "  \"" << dot_escape(e.a) << "\" -- \"" << dot_escape(e.b)
          << "\" [label=\"" << fmt_num(e.weight) << "\"];\n";
    }
    out << "}\n";
    return out.str();
  }

  if (tree.labels.size() == 1) return tree.labels[0] + ";";

  // Root at the midpoint of the longest edge; first such edge in stored
  // order, which is unique because construction orders edges by
  // (weight, a, b).
  std::size_t root = 0;
  for (std::size_t i = 1; i < tree.edges.size(); ++i) {
    if (tree.edges[i].weight > tree.edges[root].weight) root = i;
  }
  std::map<std::string, std::vector<std::pair<std::string, double>>> adj;
  for (const Tree::Edge& e : tree.edges) {
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  const std::function<std::string(const std::string&, const std::string&,
                                  double)>
      subtree = [&](const std::string& node, const std::string& from,
                    double length) -> std::string {
    std::string inner;
    for (const auto& [next, weight] : adj[node]) {
      if (next == from) continue;
      if (!inner.empty()) inner += ",";
      inner += subtree(next, node, weight);
    }
    const std::string tail = node + ":" + fmt_num(length);
    return inner.empty() ? tail : "(" + inner + ")" + tail;
  };
  const Tree::Edge& top = tree.edges[root];
  return "(" + subtree(top.a, top.b, top.weight / 2.0) + "," +
         subtree(top.b, top.a, top.weight / 2.0) + ");";
}

std::string emit_partition_dot(const EngagementGraph& graph,
                               const CommunityPartition& partition) {
  graph.validate();
  partition.validate();
  for (const std::string& account : graph.accounts) {
    require(partition.assignment.count(account) == 1,
            "partition is missing account '" + account + "'");
  }

  std::ostringstream out;
  out << "graph communities {\n  node [style=filled];\n";
  for (const std::string& account : graph.accounts) {
    const int community = partition.assignment.at(account);
    // Golden-ratio hue walk keeps adjacent community ids visually distinct.
    const double hue = std::fmod(0.618033988749895 *
                                     static_cast<double>(community),
                                 1.0);
    char color[64];
    std::snprintf(color, sizeof(color), "%.3f 0.45 0.90", hue);
    out << "  \"" << dot_escape(account) << "\" [fillcolor=\"" << color
        << "\", tooltip=\"community " << community << "\"];\n";
  }
  for (const EngagementGraph::Edge& e : graph.edges) {
    out << "  \"" << dot_escape(e.a) << "\" -- \"" << dot_escape(e.b)
        << "\" [label=\"" << e.weight << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace crunch
