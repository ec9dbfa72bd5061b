#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mycelogic {

struct GridPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

// Binary conductive mask on a width x height lattice; row-major, y down.
class GridTemplate {
 public:
  // Throws InvariantError on width/height < 3 or size mismatch and
  // DegenerateTemplateError when no node is conductive.
  GridTemplate(int width, int height, std::vector<std::uint8_t> mask);

  static GridTemplate uniform(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool conductive(int x, int y) const {
    return contains(x, y) && mask_[index(x, y)] != 0;
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  std::size_t conductive_count() const { return conductive_count_; }
  // One byte per node, 0 or 1.
  std::span<const std::uint8_t> mask() const { return mask_; }

  friend bool operator==(const GridTemplate&, const GridTemplate&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> mask_;
  std::size_t conductive_count_ = 0;
};

struct Electrode {
  GridPoint center;
  double radius = 2.0;
};

// Throws InvariantError if the centre is off-grid or radius <= 0.
void validate_electrode(const Electrode& e, const GridTemplate& t);

// Conductive nodes y with Euclidean |center - y| < radius.
std::vector<GridPoint> electrode_disc(const Electrode& e, const GridTemplate& t);

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;
};

// Binary PGM (P5), maxval 1..65535. Throws FormatError.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

// Node is conductive iff luminance (pixel / maxval) >= threshold.
GridTemplate load_template(std::span<const std::uint8_t> image_bytes,
                           double threshold = 0.5);
// PGM P5, 0 = non-conductive, 255 = conductive.
std::vector<std::uint8_t> save_template(const GridTemplate& t);

struct ColonyParams {
  std::uint64_t seed = 1;
  int width = 200;
  int height = 192;
  double branch_rate = 0.05;
  // Growth budget: total number of tip extensions.
  int steps = 5000;
};

// Tree-like hyphal mask grown from a central inoculum; 4-neighbour
// connected by construction and holding at most steps + 1 nodes.
GridTemplate synthesize_colony(const ColonyParams& params);

// Number of 4-neighbour connected components among conductive nodes.
std::size_t count_components(const GridTemplate& t);

struct GraphNode {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct GraphEdge {
  std::int64_t a = 0;
  std::int64_t b = 0;
  double length = 0.0;
};

// 3-D spatial graph; coordinates and lengths in micrometres.
class ColonyGraph {
 public:
  ColonyGraph() = default;
  // Throws InvariantError naming the offending node or edge.
  ColonyGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t node_index(std::int64_t id) const;
  bool has_node(std::int64_t id) const { return index_.contains(id); }

  // For each node index, the incident edge indices.
  std::vector<std::vector<std::size_t>> incidence() const;
  // Component label per node index.
  std::vector<std::size_t> component_labels() const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

struct GraphExtraction {
  double z_jitter = 0.0;
  std::uint64_t seed = 1;
  bool contract_chains = true;
  double um_per_node = 1.0;
};

// One node per conductive node (ids are y * width + x), 4-neighbour edges.
// With contract_chains, interior degree-2 nodes are folded into a single
// edge carrying the chain length.
ColonyGraph graph_from_template(const GridTemplate& t,
                                const GraphExtraction& options = {});

// `N <id> <x> <y> <z>` and `E <id1> <id2> [length]` lines, `#` comments.
// Throws ParseError (with line) or InvariantError.
ColonyGraph load_colony_graph(std::string_view text);
std::string format_colony_graph(const ColonyGraph& g);

}  // namespace mycelogic
