#include "mycelogic/substrate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "mycelogic/error.hpp"
#include "mycelogic/rng.hpp"

namespace mycelogic {

GridTemplate::GridTemplate(int width, int height, std::vector<std::uint8_t> mask)
    : width_(width), height_(height), mask_(std::move(mask)) {
  if (width_ < 3 || height_ < 3)
    throw InvariantError("template must be at least 3x3, got " +
                         std::to_string(width_) + "x" + std::to_string(height_));
  if (mask_.size() != static_cast<std::size_t>(width_) * height_)
    throw InvariantError("mask size does not match template dimensions");
  for (auto& m : mask_) {
    m = m ? 1 : 0;
    conductive_count_ += m;
  }
  if (conductive_count_ == 0)
    throw DegenerateTemplateError("template has no conductive node");
}

GridTemplate GridTemplate::uniform(int width, int height) {
  return GridTemplate(width, height,
                      std::vector<std::uint8_t>(
                          static_cast<std::size_t>(std::max(width, 0)) *
                              static_cast<std::size_t>(std::max(height, 0)),
                          1));
}

void validate_electrode(const Electrode& e, const GridTemplate& t) {
  if (!t.contains(e.center.x, e.center.y))
    throw InvariantError("electrode centre (" + std::to_string(e.center.x) +
                         "," + std::to_string(e.center.y) +
                         ") outside the grid");
  if (!(e.radius > 0.0)) throw InvariantError("electrode radius must be > 0");
}

std::vector<GridPoint> electrode_disc(const Electrode& e, const GridTemplate& t) {
  validate_electrode(e, t);
  std::vector<GridPoint> out;
  const int r = static_cast<int>(std::ceil(e.radius));
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (std::hypot(dx, dy) >= e.radius) continue;
      const int x = e.center.x + dx;
      const int y = e.center.y + dy;
      if (t.conductive(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

// ---------------------------------------------------------------- PGM

namespace {

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') ++pos_;
    if (start == pos_) throw FormatError("PGM header: expected integer");
    if (pos_ - start > 9) throw FormatError("PGM header: integer too large");
    int value = 0;
    for (std::size_t i = start; i < pos_; ++i) value = value * 10 + (bytes_[i] - '0');
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("not a binary PGM (P5) raster");
  PgmHeaderReader reader(bytes);
  reader.advance(2);
  GrayImage img;
  img.width = reader.next_int();
  img.height = reader.next_int();
  img.maxval = reader.next_int();
  if (img.width <= 0 || img.height <= 0)
    throw FormatError("PGM dimensions must be positive");
  if (img.maxval <= 0 || img.maxval > 65535)
    throw FormatError("PGM maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (reader.pos() >= bytes.size()) throw FormatError("PGM truncated after header");
  reader.advance(1);
  const std::size_t bpp = img.maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - reader.pos() < count * bpp)
    throw FormatError("PGM raster truncated");
  img.pixels.resize(count);
  const std::uint8_t* p = bytes.data() + reader.pos();
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = bpp == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                               : p[i];
    if (v > img.maxval) throw FormatError("PGM pixel exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n" +
                             std::to_string(image.maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = image.maxval > 255;
  out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
  for (auto v : image.pixels) {
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

GridTemplate load_template(std::span<const std::uint8_t> image_bytes, double threshold) {
  const GrayImage img = decode_pgm(image_bytes);
  std::vector<std::uint8_t> mask(img.pixels.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double lum = static_cast<double>(img.pixels[i]) / img.maxval;
    mask[i] = lum >= threshold ? 1 : 0;
  }
  return GridTemplate(img.width, img.height, std::move(mask));
}

std::vector<std::uint8_t> save_template(const GridTemplate& t) {
  GrayImage img;
  img.width = t.width();
  img.height = t.height();
  img.maxval = 255;
  img.pixels.reserve(t.mask().size());
  for (auto m : t.mask()) img.pixels.push_back(m ? 255 : 0);
  return encode_pgm(img);
}

// ---------------------------------------------------------------- colony

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

struct Tip {
  int x;
  int y;
  double heading;
  bool alive = true;
  // Most recent cells of this hypha, newest last; feeds sub-apical branching.
  std::deque<GridPoint> trail;
};

class ColonyGrower {
 public:
  ColonyGrower(const ColonyParams& p)
      : p_(p), rng_(p.seed), occupied_(static_cast<std::size_t>(p.width) * p.height, 0) {}

  GridTemplate grow() {
    const int cx = p_.width / 2;
    const int cy = p_.height / 2;
    occupy(cx, cy);
    cells_.push_back({cx, cy});
    const double heading = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    // Several germ tubes leave the inoculum unless branching is disabled.
    const int germ_tubes = p_.branch_rate > 0.0 ? 4 : 1;
    for (int g = 0; g < germ_tubes; ++g) {
      Tip tip{cx, cy, heading + g * std::numbers::pi / 2.0, true, {}};
      tip.trail.push_back({cx, cy});
      tips_.push_back(std::move(tip));
    }

    int extensions = 0;
    std::size_t cursor = 0;
    while (extensions < p_.steps) {
      if (std::none_of(tips_.begin(), tips_.end(), [](const Tip& t) { return t.alive; })) {
        // Lateral branch from an older hypha; stop when the mask is saturated.
        if (p_.branch_rate <= 0.0 || !lateral_branch()) break;
        ++extensions;
        continue;
      }
      if (cursor >= tips_.size()) cursor = 0;
      Tip& tip = tips_[cursor++];
      if (!tip.alive) continue;
      if (!extend(tip)) {
        tip.alive = false;
        continue;
      }
      ++extensions;
      if (p_.branch_rate > 0.0 && rng_.bernoulli(p_.branch_rate) && extensions < p_.steps) {
        if (branch(tip)) ++extensions;
      }
    }
    return GridTemplate(p_.width, p_.height, occupied_);
  }

 private:
  bool inside(int x, int y) const {
    return x >= 1 && y >= 1 && x < p_.width - 1 && y < p_.height - 1;
  }
  bool is_occupied(int x, int y) const {
    return occupied_[static_cast<std::size_t>(y) * p_.width + x] != 0;
  }
  void occupy(int x, int y) { occupied_[static_cast<std::size_t>(y) * p_.width + x] = 1; }

  bool lateral_branch() {
    for (int attempt = 0; attempt < 400; ++attempt) {
      const GridPoint origin = cells_[rng_.index(cells_.size())];
      const int d = static_cast<int>(rng_.index(4));
      const int nx = origin.x + kDx[d];
      const int ny = origin.y + kDy[d];
      if (!can_enter(origin.x, origin.y, nx, ny)) continue;
      occupy(nx, ny);
      cells_.push_back({nx, ny});
      Tip tip{nx, ny, std::atan2(static_cast<double>(kDy[d]), static_cast<double>(kDx[d])), true, {}};
      tip.trail.push_back(origin);
      tip.trail.push_back({nx, ny});
      tips_.push_back(std::move(tip));
      return true;
    }
    return false;
  }

  // A new cell may touch only the cell it grows from; hyphae stay one node
  // wide and never fuse.
  bool can_enter(int fromx, int fromy, int x, int y) const {
    if (!inside(x, y) || is_occupied(x, y)) return false;
    for (int d = 0; d < 4; ++d) {
      const int nx = x + kDx[d];
      const int ny = y + kDy[d];
      if (nx == fromx && ny == fromy) continue;
      if (is_occupied(nx, ny)) return false;
    }
    return true;
  }

  int pick_direction(double heading) {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    const double wx = std::abs(c);
    const double wy = std::abs(s);
    if (rng_.uniform() * (wx + wy) < wx) return c >= 0 ? 0 : 2;
    return s >= 0 ? 1 : 3;
  }

  bool extend(Tip& tip) {
    // Outward drift keeps the colony spreading from the inoculum.
    const double radial = std::atan2(tip.y - p_.height / 2.0, tip.x - p_.width / 2.0);
    if (tip.x != p_.width / 2 || tip.y != p_.height / 2)
      tip.heading += 0.15 * std::remainder(radial - tip.heading, 2.0 * std::numbers::pi);
    for (int attempt = 0; attempt < 8; ++attempt) {
      tip.heading += (0.35 + 0.15 * attempt) * rng_.normal();
      const int d = pick_direction(tip.heading);
      const int nx = tip.x + kDx[d];
      const int ny = tip.y + kDy[d];
      if (!can_enter(tip.x, tip.y, nx, ny)) continue;
      occupy(nx, ny);
      cells_.push_back({nx, ny});
      tip.x = nx;
      tip.y = ny;
      tip.trail.push_back({nx, ny});
      if (tip.trail.size() > 12) tip.trail.pop_front();
      return true;
    }
    return false;
  }

  bool branch(const Tip& parent) {
    if (parent.trail.size() < 4) return false;
    // Sub-apical origin: a few cells behind the tip.
    const std::size_t back = 3 + rng_.index(parent.trail.size() - 3);
    const GridPoint origin = parent.trail[parent.trail.size() - back];
    const double side = rng_.bernoulli(0.5) ? 1.0 : -1.0;
    const double heading =
        parent.heading + side * rng_.uniform(std::numbers::pi / 4.0, std::numbers::pi / 2.0);
    Tip child{origin.x, origin.y, heading, true, {}};
    child.trail.push_back(origin);
    if (!extend(child)) return false;
    tips_.push_back(std::move(child));
    return true;
  }

  ColonyParams p_;
  Rng rng_;
  std::vector<std::uint8_t> occupied_;
  std::vector<Tip> tips_;
  std::vector<GridPoint> cells_;
};

}  // namespace

GridTemplate synthesize_colony(const ColonyParams& params) {
  if (params.width < 16 || params.height < 16)
    throw InvariantError("colony grid must be at least 16x16");
  if (params.steps < 0) throw InvariantError("colony steps must be >= 0");
  if (!(params.branch_rate >= 0.0 && params.branch_rate <= 1.0))
    throw InvariantError("branch rate must lie in [0, 1]");
  return ColonyGrower(params).grow();
}

std::size_t count_components(const GridTemplate& t) {
  std::vector<std::uint8_t> seen(t.mask().size(), 0);
  std::size_t components = 0;
  std::vector<GridPoint> stack;
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      if (!t.conductive(x, y) || seen[t.index(x, y)]) continue;
      ++components;
      seen[t.index(x, y)] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const GridPoint p = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
          const int nx = p.x + kDx[d];
          const int ny = p.y + kDy[d];
          if (t.conductive(nx, ny) && !seen[t.index(nx, ny)]) {
            seen[t.index(nx, ny)] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return components;
}

// ---------------------------------------------------------------- graph

ColonyGraph::ColonyGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.z))
      throw InvariantError("node " + std::to_string(n.id) + " has non-finite coordinates");
    if (!index_.emplace(n.id, i).second)
      throw InvariantError("duplicate node id " + std::to_string(n.id));
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const std::string name =
        "edge " + std::to_string(i) + " (" + std::to_string(e.a) + "-" + std::to_string(e.b) + ")";
    if (!index_.contains(e.a) || !index_.contains(e.b))
      throw InvariantError(name + " references an unknown node");
    if (e.a == e.b) throw InvariantError(name + " is a self-loop");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw InvariantError(name + " has non-positive length");
  }
}

std::size_t ColonyGraph::node_index(std::int64_t id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw InvariantError("unknown node id " + std::to_string(id));
  return it->second;
}

std::vector<std::vector<std::size_t>> ColonyGraph::incidence() const {
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out[index_.at(edges_[i].a)].push_back(i);
    out[index_.at(edges_[i].b)].push_back(i);
  }
  return out;
}

std::vector<std::size_t> ColonyGraph::component_labels() const {
  std::vector<std::size_t> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& e : edges_) {
    const auto ra = find(index_.at(e.a));
    const auto rb = find(index_.at(e.b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::size_t> label(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) label[i] = find(i);
  return label;
}

namespace {

double distance3(const GraphNode& a, const GraphNode& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

ColonyGraph graph_from_template(const GridTemplate& t, const GraphExtraction& options) {
  const std::size_t cells = t.mask().size();
  Rng rng(options.seed);
  // Full-resolution lattice graph first; dense index by cell.
  std::vector<GraphNode> cell_node(cells);
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      if (!t.conductive(x, y)) continue;
      const std::size_t c = t.index(x, y);
      const double z = options.z_jitter > 0.0 ? rng.uniform(0.0, options.z_jitter) : 0.0;
      cell_node[c] = GraphNode{static_cast<std::int64_t>(c), x * options.um_per_node,
                               y * options.um_per_node, z};
    }
  }
  auto neighbours = [&](std::size_t c) {
    std::vector<std::size_t> out;
    const int x = static_cast<int>(c % t.width());
    const int y = static_cast<int>(c / t.width());
    for (int d = 0; d < 4; ++d) {
      if (t.conductive(x + kDx[d], y + kDy[d])) out.push_back(t.index(x + kDx[d], y + kDy[d]));
    }
    return out;
  };

  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  if (!options.contract_chains) {
    for (std::size_t c = 0; c < cells; ++c) {
      if (!t.mask()[c]) continue;
      nodes.push_back(cell_node[c]);
      for (auto n : neighbours(c)) {
        if (n > c) edges.push_back({cell_node[c].id, cell_node[n].id,
                                    distance3(cell_node[c], cell_node[n])});
      }
    }
    return ColonyGraph(std::move(nodes), std::move(edges));
  }

  std::vector<std::uint8_t> kept(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    if (t.mask()[c] && neighbours(c).size() != 2) kept[c] = 1;
  }
  // Pure degree-2 rings need an anchor.
  {
    std::vector<std::uint8_t> seen(cells, 0);
    for (std::size_t c = 0; c < cells; ++c) {
      if (!t.mask()[c] || kept[c] || seen[c]) continue;
      std::vector<std::size_t> stack{c};
      seen[c] = 1;
      bool touches_kept = false;
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto n : neighbours(v)) {
          if (kept[n]) touches_kept = true;
          else if (!seen[n]) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
      }
      if (!touches_kept) kept[c] = 1;
    }
  }

  // Walk chains; a chain that returns to its own start gets its middle node kept
  // so that no self-loop is produced.
  for (;;) {
    edges.clear();
    std::vector<std::uint8_t> consumed(cells, 0);
    bool changed = false;
    for (std::size_t c = 0; c < cells && !changed; ++c) {
      if (!kept[c]) continue;
      for (auto first : neighbours(c)) {
        if (kept[first]) {
          if (first > c)
            edges.push_back({cell_node[c].id, cell_node[first].id,
                             distance3(cell_node[c], cell_node[first])});
          continue;
        }
        if (consumed[first]) continue;
        std::vector<std::size_t> chain;
        double length = distance3(cell_node[c], cell_node[first]);
        std::size_t prev = c;
        std::size_t cur = first;
        while (!kept[cur]) {
          chain.push_back(cur);
          const auto nb = neighbours(cur);
          const std::size_t next = nb[0] == prev ? nb[1] : nb[0];
          length += distance3(cell_node[cur], cell_node[next]);
          prev = cur;
          cur = next;
        }
        if (cur == c) {
          kept[chain[chain.size() / 2]] = 1;
          changed = true;
          break;
        }
        for (auto v : chain) consumed[v] = 1;
        edges.push_back({cell_node[c].id, cell_node[cur].id, length});
      }
    }
    if (!changed) break;
  }

  for (std::size_t c = 0; c < cells; ++c) {
    if (kept[c]) nodes.push_back(cell_node[c]);
  }
  return ColonyGraph(std::move(nodes), std::move(edges));
}

// ---------------------------------------------------------------- graph io

namespace {

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  return v;
}

std::int64_t parse_id(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(line, "invalid node id '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

ColonyGraph load_colony_graph(std::string_view text) {
  std::vector<GraphNode> nodes;
  struct PendingEdge {
    std::int64_t a, b;
    double length;  // <= 0 means "not given"
    bool given;
    std::size_t line;
  };
  std::vector<PendingEdge> pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "N") {
      if (tok.size() != 5) throw ParseError(line_no, "node record needs 'N <id> <x> <y> <z>'");
      nodes.push_back({parse_id(tok[1], line_no), parse_double(tok[2], line_no),
                       parse_double(tok[3], line_no), parse_double(tok[4], line_no)});
    } else if (tok[0] == "E") {
      if (tok.size() != 3 && tok.size() != 4)
        throw ParseError(line_no, "edge record needs 'E <id1> <id2> [length]'");
      PendingEdge e{parse_id(tok[1], line_no), parse_id(tok[2], line_no), 0.0, tok.size() == 4,
                    line_no};
      if (e.given) {
        e.length = parse_double(tok[3], line_no);
        if (!(e.length > 0.0))
          throw InvariantError("line " + std::to_string(line_no) + ": edge " +
                               std::to_string(e.a) + "-" + std::to_string(e.b) +
                               " has non-positive length");
      }
      pending.push_back(e);
    } else {
      throw ParseError(line_no, "unknown record type '" + std::string(tok[0]) + "'");
    }
  }
  std::unordered_map<std::int64_t, std::size_t> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!idx.emplace(nodes[i].id, i).second)
      throw InvariantError("duplicate node id " + std::to_string(nodes[i].id));
  }
  std::vector<GraphEdge> edges;
  edges.reserve(pending.size());
  for (const auto& e : pending) {
    const auto ia = idx.find(e.a);
    const auto ib = idx.find(e.b);
    const std::string name = "line " + std::to_string(e.line) + ": edge " + std::to_string(e.a) +
                             "-" + std::to_string(e.b);
    if (ia == idx.end() || ib == idx.end()) throw InvariantError(name + " references an unknown node");
    if (e.a == e.b) throw InvariantError(name + " is a self-loop");
    double length = e.length;
    if (!e.given) {
      length = distance3(nodes[ia->second], nodes[ib->second]);
      if (!(length > 0.0)) throw InvariantError(name + " joins coincident nodes without a length");
    }
    edges.push_back({e.a, e.b, length});
  }
  return ColonyGraph(std::move(nodes), std::move(edges));
}

std::string format_colony_graph(const ColonyGraph& g) {
  std::string out = "# colony graph: " + std::to_string(g.nodes().size()) + " nodes, " +
                    std::to_string(g.edges().size()) + " edges\n";
  char buf[160];
  for (const auto& n : g.nodes()) {
    std::snprintf(buf, sizeof buf, "N %lld %.17g %.17g %.17g\n", static_cast<long long>(n.id), n.x,
                  n.y, n.z);
    out += buf;
  }
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "E %lld %lld %.17g\n", static_cast<long long>(e.a),
                  static_cast<long long>(e.b), e.length);
    out += buf;
  }
  return out;
}

}  // namespace mycelogic
