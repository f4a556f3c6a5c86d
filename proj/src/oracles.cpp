#include "chamber/oracles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include <fmt/format.h>

namespace chamber::oracle {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x)
  {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

SurfaceCensus census(const ChamberComplex& cx)
{
  std::map<PieceId, const Piece*> pieces;
  std::map<PieceId, std::vector<PieceId>> adjacent;
  std::map<PieceId, int> used_slots;
  for (const auto& comp : cx.components) {
    for (const auto& p : comp.cut.pieces)
      pieces[p.id] = &p;
    for (const auto& k : comp.cut.curves) {
      adjacent[k.a.piece].push_back(k.b.piece);
      adjacent[k.b.piece].push_back(k.a.piece);
      ++used_slots[k.a.piece];
      ++used_slots[k.b.piece];
    }
  }
  SurfaceCensus out;
  std::set<PieceId> seen;
  for (const auto& [id, p] : pieces) {
    out.euler += 2 - 2 * p->genus - p->slots;
    if (seen.contains(id))
      continue;
    std::vector<PieceId> cls;
    std::deque<PieceId> queue{id};
    seen.insert(id);
    int chi = 0;
    while (!queue.empty()) {
      const PieceId x = queue.front();
      queue.pop_front();
      cls.push_back(x);
      chi += 2 - 2 * pieces.at(x)->genus - pieces.at(x)->slots;
      for (auto y : adjacent[x])
        if (pieces.contains(y) && seen.insert(y).second)
          queue.push_back(y);
    }
    std::sort(cls.begin(), cls.end());
    out.classes.push_back(cls);
    out.genera.push_back((2 - chi) / 2);
  }
  return out;
}

std::optional<std::string> check_euler(const ChamberComplex& before, const DiskSet& disks, const RawComplex& raw)
{
  const auto b = census(before), a = census(raw.raw);
  const int expected = b.euler + 2 * static_cast<int>(disks.size());
  if (a.euler != expected)
    return fmt::format("euler characteristic {} after {} disks, expected {}", a.euler, disks.size(), expected);
  if (a.classes.size() != raw.raw.components.size())
    return fmt::format("{} connected surfaces but {} components", a.classes.size(), raw.raw.components.size());
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    const auto owner = raw.raw.component_of_piece(a.classes[i].front());
    if (!owner)
      return fmt::format("piece {} has no component", a.classes[i].front().value);
    const auto& comp = raw.raw.component(*owner);
    std::vector<PieceId> ids;
    for (const auto& p : comp.cut.pieces)
      ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    if (ids != a.classes[i])
      return fmt::format("component {} is not connected as recorded", owner->value);
    if (comp.genus != a.genera[i])
      return fmt::format("component {} has genus {} but its pieces give {}", owner->value, comp.genus, a.genera[i]);
  }
  return std::nullopt;
}

std::optional<std::string> check_disky(const RawComplex& raw)
{
  const auto& cx = raw.raw;
  const int bound = next_piece_id(raw.before);
  const auto cen = census(cx);
  std::map<ComponentId, int> genus;
  for (std::size_t i = 0; i < cen.classes.size(); ++i)
    if (auto c = cx.component_of_piece(cen.classes[i].front()))
      genus[*c] = cen.genera[i];

  for (const auto& y : cx.components) {
    const auto& inc = cx.incidence_of(y.id);
    for (auto [inner, outer] : {std::pair{inc.side_a, inc.side_b}, std::pair{inc.side_b, inc.side_a}}) {
      if (!is_disky(raw, y.id, inner))
        continue;
      const auto w = side_of(cx, y.id, inner);
      const auto where = fmt::format("side of component {} at chamber {}", y.id.value, inner.value);
      for (const auto& z : cx.incidence) {
        if (!w.contains(z.side_a) || !w.contains(z.side_b))
          continue;
        const auto& comp = cx.component(z.component);
        if (std::all_of(comp.cut.pieces.begin(), comp.cut.pieces.end(),
                        [&](const Piece& p) { return p.id.value < bound; }))
          return fmt::format("{} is disky but holds untouched component {}", where, z.component.value);
        if (genus.at(z.component) != 0)
          return fmt::format("{} is disky but holds component {} of genus {}", where, z.component.value,
                             genus.at(z.component));
        // The side of this sphere away from y must be disky too.
        const auto away = side_of(cx, z.component, z.side_a).contains(outer) ? z.side_b : z.side_a;
        if (!is_disky(raw, z.component, away))
          return fmt::format("{} is disky but the inner sphere {} bounds a side that is not", where,
                             z.component.value);
      }
      for (const auto& s : raw.scars) {
        if (!w.contains(s.handle_chamber))
          continue;
        const auto ha = cx.component_of_piece(s.scar_a), hb = cx.component_of_piece(s.scar_b);
        if (!ha || !hb || *ha == *hb)
          return fmt::format("{} is disky but disk {} has both scars on one component", where, s.disk.value);
      }
    }
  }
  return std::nullopt;
}

bool RuleVerdict::consistent() const
{
  return flags_valid && std::all_of(rules.begin(), rules.end(), [](bool b) { return b; });
}

RuleVerdict six_rules(const SplitView& view)
{
  RuleVerdict v;
  auto flag_of = [](const RemnantView& r) { return r.flag.value_or(Flag::Occupied); };
  auto disky_handlebody = [](const RemnantView& r) { return r.gone || (r.disky && r.handlebody); };
  auto disky_ball = [](const RemnantView& r) { return r.gone || (r.disky && r.ball); };
  for (const auto& r : view.remnants) {
    if (r.gone)
      continue;
    const bool empty = flag_of(r) == Flag::Empty;
    // 1: a chamber that is not a disky handlebody is occupied.
    if (empty && !disky_handlebody(r))
      v.rules[0] = false;
    // 2: a ball chamber is occupied.
    if (empty && r.ball)
      v.rules[1] = false;
    if (empty && !(r.handlebody && r.known_nonball))
      v.flags_valid = false;
  }
  if (view.old_flag == Flag::Empty)
    return v;
  std::vector<const RemnantView*> survivors, occupied;
  for (const auto& r : view.remnants)
    if (!r.gone) {
      survivors.push_back(&r);
      if (flag_of(r) == Flag::Occupied)
        occupied.push_back(&r);
    }
  // 3: at least one remnant of an occupied chamber is occupied.
  v.rules[2] = !occupied.empty();
  const bool every_dhb = std::all_of(view.remnants.begin(), view.remnants.end(), disky_handlebody);
  const bool every_dball = std::all_of(view.remnants.begin(), view.remnants.end(), disky_ball);
  // 4: unless every remnant is a disky handlebody, no occupied remnant is one.
  if (!every_dhb)
    for (auto* r : occupied)
      if (disky_handlebody(*r))
        v.rules[3] = false;
  // 5: unless every remnant is a disky ball, all disky ball remnants are goneballs.
  if (!every_dball)
    for (auto* r : survivors)
      if (disky_ball(*r))
        v.rules[4] = false;
  // 6: if every remnant is a disky ball, one survives and it is occupied.
  if (every_dball)
    v.rules[5] = survivors.size() == 1 && occupied.size() == 1;
  return v;
}

namespace {

// Half-edge 4v+i; edges of the two-vertex graph for each shape.
std::vector<std::pair<int, int>> graph_edges(VertexShape shape)
{
  switch (shape) {
    case VertexShape::SeparateLobeLobe:
    case VertexShape::SeparateLobeOuter:
    case VertexShape::SeparateOuterOuter:
      return {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
    case VertexShape::ChainInside:
    case VertexShape::ChainOutside:
      return {{0, 1}, {4, 5}, {2, 7}, {3, 6}};
    case VertexShape::Crossed:
      return {{0, 7}, {1, 6}, {2, 5}, {3, 4}};
  }
  return {};
}

// The two arcs at a vertex under a smoothing: pairs of local half-edge indices.
std::array<std::pair<int, int>, 2> arcs(bool first)
{
  if (first)
    return {std::pair{0, 1}, std::pair{2, 3}};
  return {std::pair{1, 2}, std::pair{0, 3}};
}

// Circle index of every half-edge in the resolution.
std::vector<int> circles_of(VertexShape shape, std::array<bool, 2> first, int& count)
{
  UnionFind uf(8);
  for (auto [a, b] : graph_edges(shape))
    uf.join(a, b);
  for (int v = 0; v < 2; ++v)
    for (auto [a, b] : arcs(first[v]))
      uf.join(4 * v + a, 4 * v + b);
  // Circles are numbered in the order their first edge appears in the shape.
  std::map<int, int> index;
  for (auto [a, b] : graph_edges(shape))
    index.try_emplace(uf.find(a), static_cast<int>(index.size()));
  std::vector<int> out(8);
  for (int h = 0; h < 8; ++h)
    out[h] = index.at(uf.find(h));
  count = static_cast<int>(index.size());
  return out;
}

// Whether the surface on one side has a component of positive genus after
// bands are attached at the listed vertices of its base resolution.
bool side_positive(VertexShape shape, std::array<bool, 2> base, const SidePartition& part, std::vector<int> bands)
{
  int base_count = 0;
  const auto base_circle = circles_of(shape, base, base_count);
  const int blocks = static_cast<int>(part.genus.size());
  std::vector<int> boundary(blocks, 0);
  for (int c = 0; c < base_count; ++c)
    ++boundary[part.block[c]];
  UnionFind uf(blocks);
  std::vector<int> band_block;
  for (int v : bands) {
    const auto [a, b] = arcs(base[v]);
    const int x = part.block[base_circle[4 * v + a.first]], y = part.block[base_circle[4 * v + b.first]];
    uf.join(x, y);
    band_block.push_back(x);
  }
  std::array<bool, 2> final_smoothing = base;
  for (int v : bands)
    final_smoothing[v] = !final_smoothing[v];
  int final_count = 0;
  const auto final_circle = circles_of(shape, final_smoothing, final_count);
  std::map<int, int> chi, circles;
  for (int k = 0; k < blocks; ++k)
    chi[uf.find(k)] += 2 - 2 * part.genus[k] - boundary[k];
  for (int x : band_block)
    chi[uf.find(x)] -= 1;
  // A final circle runs along arcs of base circles; every base circle it meets
  // lies in its component.
  std::vector<int> owner(final_count, -1);
  for (int h = 0; h < 8; ++h)
    owner[final_circle[h]] = uf.find(part.block[base_circle[h]]);
  for (int c = 0; c < final_count; ++c)
    ++circles[owner[c]];
  for (const auto& [root, x] : chi)
    if (2 - x - circles[root] > 0)
      return true;
  return false;
}

}  // namespace

QuadrantTruth quadrants(const QuadrantConfig& config)
{
  const auto up = config.up_first;
  const std::array<bool, 2> down{!up[0], !up[1]};
  QuadrantTruth t;
  const auto s = config.shape;
  auto pos_above = [&](std::vector<int> b) { return side_positive(s, up, config.above, std::move(b)); };
  auto pos_below = [&](std::vector<int> b) { return side_positive(s, down, config.below, std::move(b)); };
  t.labels[static_cast<int>(Quadrant::N)] = Label{pos_above({}), pos_below({1, 0})};
  t.labels[static_cast<int>(Quadrant::P)] = Label{pos_above({0}), pos_below({1})};
  t.labels[static_cast<int>(Quadrant::Q)] = Label{pos_above({1}), pos_below({0})};
  t.labels[static_cast<int>(Quadrant::R)] = Label{pos_above({0, 1}), pos_below({})};
  auto count = [&](std::array<bool, 2> f) {
    int n = 0;
    circles_of(s, f, n);
    return n;
  };
  t.circles[static_cast<int>(Quadrant::N)] = count(up);
  t.circles[static_cast<int>(Quadrant::P)] = count({down[0], up[1]});
  t.circles[static_cast<int>(Quadrant::Q)] = count({up[0], down[1]});
  t.circles[static_cast<int>(Quadrant::R)] = count(down);
  return t;
}

BandTruth band(const Graphic& g)
{
  BandTruth t;
  const int w = g.columns(), h = g.rows();
  std::vector<int> lo(w, -1), hi(w, -1);
  t.column_intervals = true;
  for (int c = 0; c < w; ++c) {
    int runs = 0;
    for (int s = 0; s < h; ++s) {
      if (!g.regions[c][s].balanced())
        continue;
      if (s == 0 || !g.regions[c][s - 1].balanced())
        ++runs;
      if (lo[c] < 0)
        lo[c] = s;
      hi[c] = s;
    }
    t.column_intervals = t.column_intervals && runs == 1;
  }

  UnionFind uf(w * h);
  int cells = 0;
  auto in = [&](int c, int s) { return s >= 0 && s < h && g.regions[c][s].balanced(); };
  for (int c = 0; c < w; ++c)
    for (int s = 0; s < h; ++s) {
      if (!in(c, s))
        continue;
      ++cells;
      for (int dc = 0; dc <= 1; ++dc)
        for (int ds = -1; ds <= 1; ++ds) {
          if (dc == 0 && ds <= 0)
            continue;
          int c2 = c + dc;
          if (c2 == w) {
            if (!g.annulus)
              continue;
            c2 = 0;
          }
          if (in(c2, s + ds))
            uf.join(c * h + s, c2 * h + s + ds);
        }
    }
  std::set<int> roots;
  for (int c = 0; c < w; ++c)
    for (int s = 0; s < h; ++s)
      if (in(c, s))
        roots.insert(uf.find(c * h + s));
  t.connected = cells > 0 && roots.size() == 1;

  if (g.annulus && t.column_intervals) {
    t.essential_loop = true;
    for (int c = 0; c < w; ++c) {
      const int d = (c + 1) % w;
      if (lo[d] > hi[c] + 1 || lo[c] > hi[d] + 1)
        t.essential_loop = false;
    }
  }
  return t;
}

bool ledger_connected(const EquivalenceLedger& ledger, int a, int b)
{
  std::map<int, int> index;
  auto id = [&](int x) { return index.try_emplace(x, static_cast<int>(index.size())).first->second; };
  id(a);
  id(b);
  for (const auto& w : ledger.witnesses()) {
    id(w.seq_a);
    id(w.seq_b);
  }
  UnionFind uf(static_cast<int>(index.size()));
  for (const auto& w : ledger.witnesses())
    uf.join(index.at(w.seq_a), index.at(w.seq_b));
  return uf.find(index.at(a)) == uf.find(index.at(b));
}

}  // namespace chamber::oracle
