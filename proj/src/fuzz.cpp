#include "chamber/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "chamber/builders.hpp"
#include "chamber/catalog.hpp"
#include "chamber/oracles.hpp"

namespace chamber {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, int in) { return uniform(rng, 0, in - 1) == 0; }

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs)
{
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

std::uint64_t fnv1a(const std::string& text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_bounds(const FuzzBounds& b)
{
  if (b.max_components < 1 || b.max_genus < 0 || b.max_disks < 0 || b.max_sequence < 0)
    throw InputError(fmt::format("bounds admit no scene: components {}, genus {}, disks {}, sequence {}",
                                 b.max_components, b.max_genus, b.max_disks, b.max_sequence));
}

SurfaceShape random_shape(std::mt19937_64& rng, int genus, bool with_curves)
{
  if (!with_curves)
    return SurfaceShape{genus, 0, 0, {}};
  SurfaceShape shape;
  shape.loops = uniform(rng, 0, genus);
  int rest = genus - shape.loops;
  const int sides = uniform(rng, 0, std::min(2, rest));
  for (int i = 0; i < sides; ++i) {
    const int g = uniform(rng, 1, rest - (sides - 1 - i));
    shape.separating_sides.push_back(g);
    rest -= g;
  }
  shape.body_genus = rest;
  shape.caps = uniform(rng, 0, 2);
  return shape;
}

}  // namespace

std::mt19937_64 instance_rng(std::uint64_t seed, std::size_t index)
{
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

ChamberComplex random_complex(std::mt19937_64& rng, const FuzzBounds& bounds, AmbientMode mode, bool annotate)
{
  check_bounds(bounds);
  const int n = uniform(rng, 1, bounds.max_components);
  SceneBuilder b(mode);
  std::vector<ChamberId> ch{b.chamber()};
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) {
    parent[i] = uniform(rng, 0, i);
    ch.push_back(b.chamber());
  }
  std::vector<int> genus(n);
  for (int i = 0; i < n; ++i) {
    genus[i] = i == 0 ? bounds.max_genus : uniform(rng, 0, bounds.max_genus);
    const auto shape = random_shape(rng, genus[i], bounds.max_disks > 0);
    if (chance(rng, 2))
      b.surface(shape, ch[parent[i]], ch[i + 1]);
    else
      b.surface(shape, ch[i + 1], ch[parent[i]]);
  }
  if (annotate) {
    for (int c = 0; c <= n; ++c) {
      std::vector<int> bounding;
      for (int i = 0; i < n; ++i)
        if (parent[i] == c || i + 1 == c)
          bounding.push_back(i);
      if (bounding.size() != 1)
        continue;
      const int g = genus[bounding.front()];
      if (g == 1 && chance(rng, 3))
        b.annotate(ch[c], solid_torus_annotation());
      else if (g >= 1 && chance(rng, 4))
        b.annotate(ch[c], handlebody_annotation());
      else if (g == 0 && mode == AmbientMode::Annotated && chance(rng, 2))
        b.annotate(ch[c], ball_annotation_value());
    }
  }
  return b.build().complex;
}

FlagMap random_flags(const ChamberComplex& cx, std::mt19937_64& rng, bool non_tiny)
{
  FlagMap flags;
  for (int attempt = 0; attempt < 20; ++attempt) {
    flags.clear();
    for (const auto& c : cx.chambers) {
      const auto a = effective_annotation(cx, c);
      const bool may_empty = a.is_handlebody == Tri::Yes && a.is_ball == Tri::No;
      flags[c.id] = may_empty && chance(rng, 2) ? Flag::Empty : Flag::Occupied;
    }
    if (!non_tiny || is_tiny(FlaggedComplex{cx, flags}) == TinyVerdict::NotTiny)
      return flags;
  }
  for (auto& [c, f] : flags)
    f = Flag::Occupied;
  return flags;
}

DiskSet random_disk_set(const ChamberComplex& cx, std::mt19937_64& rng, int max_disks)
{
  std::vector<std::pair<ComponentId, CurveId>> curves;
  for (const auto& comp : cx.components)
    for (const auto& k : comp.cut.curves)
      curves.emplace_back(comp.id, k.id);
  std::shuffle(curves.begin(), curves.end(), rng);
  const int want = uniform(rng, 0, max_disks);
  DiskSet out;
  for (const auto& [comp, curve] : curves) {
    if (static_cast<int>(out.size()) >= want)
      break;
    const auto& inc = cx.incidence_of(comp);
    const ChamberId chamber = chance(rng, 2) ? inc.side_a : inc.side_b;
    std::vector<PieceId> carries;
    for (auto y : cx.chamber(chamber).boundary)
      if (y != comp && chance(rng, 2))
        carries.push_back(cx.component(y).cut.pieces.front().id);
    DiskAttachment d{DiskId{static_cast<int>(out.size())}, chamber, comp, curve, std::nullopt, carries};
    if (std::any_of(out.begin(), out.end(), [&](const DiskAttachment& e) { return disks_cross(cx, d, e); }))
      continue;
    DiskSet trial = out;
    trial.push_back(d);
    const auto nesting = compute_nesting(cx, trial);
    for (auto& t : trial)
      t.nesting_parent = nesting.contains(t.id) ? nesting.at(t.id) : std::nullopt;
    if (!validate_disk_set(cx, trial).ok())
      continue;
    try {
      surger(cx, trial);
    } catch (const InputError&) {
      continue;
    }
    out = std::move(trial);
  }
  return out;
}

Graphic random_graphic(std::mt19937_64& rng, int max_columns, int max_rows, bool annulus)
{
  const int w = uniform(rng, 1, std::max(1, max_columns));
  const int h = uniform(rng, 3, std::max(3, max_rows));
  // Column c switches the above digit off at row a and the below digit on at
  // row b; neighbours may not switch both digits across one row.
  using Switch = std::pair<int, int>;
  std::vector<Switch> all;
  for (int a = 1; a < h; ++a)
    for (int b = 1; b < h; ++b)
      if (a != b)
        all.emplace_back(a, b);
  auto compatible = [](Switch x, Switch y) {
    const int alo = std::min(x.first, y.first), ahi = std::max(x.first, y.first);
    const int blo = std::min(x.second, y.second), bhi = std::max(x.second, y.second);
    return ahi <= blo || bhi <= alo;
  };
  std::vector<Switch> cols;
  while (true) {
    cols = {pick(rng, all)};
    bool ok = true;
    for (int c = 1; c < w && ok; ++c) {
      std::vector<Switch> next;
      for (auto s : all)
        if (compatible(cols.back(), s) && (!annulus || c + 1 < w || compatible(s, cols.front())))
          next.push_back(s);
      if (next.empty())
        ok = false;
      else
        cols.push_back(pick(rng, next));
    }
    if (ok)
      break;
  }
  Graphic g;
  g.annulus = annulus;
  for (auto [a, b] : cols) {
    std::vector<Label> col;
    for (int s = 0; s < h; ++s)
      col.push_back(Label{s < a, s >= b});
    g.regions.push_back(col);
  }
  return g;
}

GuidedInstance random_guided_instance(std::mt19937_64& rng, const FuzzBounds& bounds)
{
  check_bounds(bounds);
  const int n = uniform(rng, 1, bounds.max_components);
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i)
    parent[i] = uniform(rng, 0, i);
  auto chambers_of = [&](int i) { return std::pair{parent[i], i + 1}; };
  auto across = [&](int i, int c) { return c == parent[i] ? i + 1 : parent[i]; };
  const int per_component = std::max(1, bounds.max_genus - 1);

  // Grow the sphere's faces: each new face sits across one surface from an old one.
  struct Crossing {
    int component, face_a, face_b;
  };
  std::vector<int> face_chamber{uniform(rng, 0, n)};
  std::vector<Crossing> crossings;
  std::vector<int> m(n, 0);
  const int target = uniform(rng, 1, std::min(6, n * per_component));
  for (int tries = 0; static_cast<int>(crossings.size()) < target && tries < 100; ++tries) {
    const int f = uniform(rng, 0, static_cast<int>(face_chamber.size()) - 1);
    std::vector<int> options;
    for (int i = 0; i < n; ++i) {
      const auto [a, b] = chambers_of(i);
      if ((a == face_chamber[f] || b == face_chamber[f]) && m[i] < per_component)
        options.push_back(i);
    }
    if (options.empty())
      continue;
    const int x = pick(rng, options);
    face_chamber.push_back(across(x, face_chamber[f]));
    crossings.push_back({x, f, static_cast<int>(face_chamber.size()) - 1});
    ++m[x];
  }

  // Surfaces that miss the sphere lie wholly above or below it, together with
  // everything on their far side.
  std::vector<std::optional<Side>> whole_side(n);
  std::set<int> face_chambers(face_chamber.begin(), face_chamber.end());
  std::vector<std::optional<Side>> chamber_side(n + 1);
  std::deque<int> queue(face_chambers.begin(), face_chambers.end());
  std::set<int> seen(face_chambers.begin(), face_chambers.end());
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int i = 0; i < n; ++i) {
      const auto [a, b] = chambers_of(i);
      if (a != c && b != c)
        continue;
      const int d = across(i, c);
      if (seen.contains(d))
        continue;
      whole_side[i] = chamber_side[c] ? *chamber_side[c] : (chance(rng, 2) ? Side::Above : Side::Below);
      chamber_side[d] = whole_side[i];
      seen.insert(d);
      queue.push_back(d);
    }
  }

  // Genus of the part above and below each crossing surface, and of each whole one.
  std::vector<int> g_above(n, 0), g_below(n, 0), g_whole(n, 0);
  const bool has_handle_pair = std::any_of(m.begin(), m.end(), [](int k) { return k >= 2; });
  const bool balanced_high = !has_handle_pair || chance(rng, 2);
  if (balanced_high) {
    for (int i = 0; i < n; ++i) {
      const int room = std::max(0, bounds.max_genus - std::max(0, m[i] - 1));
      if (m[i] > 0) {
        g_above[i] = uniform(rng, 0, room);
        g_below[i] = uniform(rng, 0, room - g_above[i]);
      } else {
        g_whole[i] = uniform(rng, 0, bounds.max_genus);
      }
    }
    auto positive = [&](Side s) {
      for (int i = 0; i < n; ++i)
        if ((m[i] > 0 && (s == Side::Above ? g_above[i] : g_below[i]) > 0) ||
            (m[i] == 0 && whole_side[i] == s && g_whole[i] > 0))
          return true;
      return false;
    };
    std::vector<int> crossing_ids;
    for (int i = 0; i < n; ++i)
      if (m[i] > 0)
        crossing_ids.push_back(i);
    if (!positive(Side::Above))
      g_above[pick(rng, crossing_ids)] += 1;
    if (!positive(Side::Below))
      g_below[pick(rng, crossing_ids)] += 1;
  }

  ChamberComplex cx;
  cx.mode = AmbientMode::Sphere;
  for (int c = 0; c <= n; ++c)
    cx.chambers.push_back(Chamber{ChamberId{c}, {}, {}, {}});
  GuideSphere guide;
  guide.id = 1;
  guide.level = kLevelScale / 2;
  for (int f = 0; f < static_cast<int>(face_chamber.size()); ++f)
    guide.faces.push_back(GuideFace{f, ChamberId{face_chamber[f]}});
  int next_piece = 0, next_curve = 0;
  std::vector<std::vector<CurveId>> circle_curves(n);
  std::vector<PieceId> above_pieces;
  std::vector<std::vector<PieceId>> own(n);
  for (int i = 0; i < n; ++i) {
    SurfaceComponent comp{ComponentId{i}, 0, {}};
    if (m[i] > 0) {
      const PieceId up{next_piece++}, down{next_piece++};
      comp.cut.pieces = {Piece{up, g_above[i], m[i]}, Piece{down, g_below[i], m[i]}};
      for (int k = 0; k < m[i]; ++k) {
        const CurveId id{next_curve++};
        comp.cut.curves.push_back(Curve{id, Slot{up, k}, Slot{down, k}});
        circle_curves[i].push_back(id);
      }
      guide.sides[up] = Side::Above;
      guide.sides[down] = Side::Below;
      above_pieces.push_back(up);
      own[i] = {up, down};
    } else {
      const PieceId p{next_piece++};
      comp.cut.pieces = {Piece{p, g_whole[i], 0}};
      guide.sides[p] = *whole_side[i];
      if (*whole_side[i] == Side::Above)
        above_pieces.push_back(p);
      own[i] = {p};
    }
    comp.genus = component_genus(comp.cut);
    cx.components.push_back(comp);
    cx.incidence.push_back(Incidence{ComponentId{i}, ChamberId{parent[i]}, ChamberId{i + 1}});
    cx.chamber(ChamberId{parent[i]}).boundary.push_back(ComponentId{i});
    cx.chamber(ChamberId{i + 1}).boundary.push_back(ComponentId{i});
  }
  // When a circle is the last one on its surface, the disk it bounds splits
  // its chamber into the part above the sphere and the part below; the above
  // half sits on the slot-a side.
  std::vector<int> used(n, 0);
  for (const auto& x : crossings) {
    std::vector<PieceId> carries;
    for (auto p : above_pieces)
      if (std::find(own[x.component].begin(), own[x.component].end(), p) == own[x.component].end())
        carries.push_back(p);
    guide.circles.push_back(GuideCircle{circle_curves[x.component][used[x.component]++], x.face_a, x.face_b, carries});
  }
  cx.sort_canonical();

  GuidedInstance out;
  out.start.complex = cx;
  for (const auto& c : cx.chambers)
    out.start.flags[c.id] = Flag::Occupied;
  out.guide = guide;
  const Label label = guide_label(cx, guide);
  if (!label.balanced())
    throw ContractViolation("guided instance generator produced an unbalanced sphere");
  const std::int64_t s_star = guide.level;
  auto event_level = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  // Above switches off, below switches on; a 11 level sits between the below
  // switch and the above switch, a 00 level after the above switch.
  const std::int64_t first = event_level(1, s_star - 1), second = event_level(s_star + 1, kLevelScale - 1);
  out.profile.events.push_back({first, EventKind::Saddle, label.above ? DigitEffect::Below : DigitEffect::Above, {}});
  out.profile.events.push_back({second, EventKind::Saddle, label.above ? DigitEffect::Above : DigitEffect::Below, {}});
  for (int k = uniform(rng, 0, 3); k > 0; --k) {
    const std::int64_t s = event_level(1, kLevelScale - 1);
    if (s == s_star || std::any_of(out.profile.events.begin(), out.profile.events.end(),
                                   [&](const LevelEvent& e) { return e.s == s; }))
      continue;
    out.profile.events.push_back({s, chance(rng, 2) ? EventKind::Birth : EventKind::Death, DigitEffect::None, {}});
  }
  std::sort(out.profile.events.begin(), out.profile.events.end(),
            [](const LevelEvent& a, const LevelEvent& b) { return a.s < b.s; });
  if (auto r = validate_complex(cx); !r.ok())
    throw ContractViolation("guided instance generator: " + r.issues.front().detail);
  if (auto r = validate_guide(cx, guide); !r.ok())
    throw ContractViolation("guided instance generator: " + r.issues.front().detail);
  return out;
}

BullseyeInstance random_bullseye_instance(std::mt19937_64& rng, const FuzzBounds& bounds)
{
  BullseyeInstance out;
  out.base.complex = random_complex(rng, bounds, AmbientMode::Sphere, true);
  out.base.flags = random_flags(out.base.complex, rng, false);
  DiskSet base_disks = random_disk_set(out.base.complex, rng, bounds.max_disks);

  Bullseye eye;
  eye.host = pick(rng, out.base.complex.chambers).id;
  eye.k = uniform(rng, 0, 3);
  eye.blank = eye.k > 0 && chance(rng, 3);
  if (chance(rng, 3)) {
    eye.torus_side = TopAnnotation{Tri::No, Tri::No, Tri::No, Tri::Unknown};
    eye.torus_side_flag = Flag::Occupied;
  } else {
    eye.torus_side = solid_torus_annotation();
    eye.torus_side_flag = chance(rng, 2) ? Flag::Empty : Flag::Occupied;
  }
  const auto inserted = insert_bullseye(out.base, eye);
  const auto& cx = inserted.complex.complex;
  const auto& rec = inserted.bullseye;
  const bool inner_solid = eye.torus_side.is_solid_torus == Tri::Yes;

  // Base disks in the host decide which side the bullseye lies on.
  const PieceId outer_piece = cx.component(rec.spheres.empty() ? *rec.torus : rec.spheres.front()).cut.pieces.front().id;
  for (auto& d : base_disks)
    if (d.chamber == eye.host && chance(rng, 2))
      d.carries.push_back(outer_piece);

  std::vector<DiskAttachment> wanted;
  auto propose = [&](ComponentId comp, CurveId curve, ChamberId chamber) {
    std::vector<PieceId> carries;
    for (auto y : cx.chamber(chamber).boundary)
      if (y != comp && chance(rng, 2))
        carries.push_back(cx.component(y).cut.pieces.front().id);
    wanted.push_back(DiskAttachment{DiskId{0}, chamber, comp, curve, std::nullopt, carries});
  };
  std::vector<ChamberId> outside{eye.host};
  outside.insert(outside.end(), rec.chambers.begin(), rec.chambers.end());
  for (std::size_t i = 0; i < rec.spheres.size(); ++i)
    if (chance(rng, 3))
      propose(rec.spheres[i], rec.sphere_curves[i], chance(rng, 2) ? outside[i] : outside[i + 1]);
  if (rec.torus) {
    const ChamberId inner = rec.chambers.back(), outer = outside[outside.size() - 2];
    if (chance(rng, 3))
      propose(*rec.torus, *rec.torus_meridian, inner_solid && chance(rng, 2) ? inner : outer);
    if (chance(rng, 4))
      propose(*rec.torus, *rec.torus_trivial, chance(rng, 2) ? inner : outer);
  }

  DiskSet all = base_disks;
  for (auto d : wanted) {
    d.id = DiskId{static_cast<int>(all.size())};
    if (std::any_of(all.begin(), all.end(), [&](const DiskAttachment& e) { return disks_cross(cx, d, e); }))
      continue;
    DiskSet trial = all;
    trial.push_back(d);
    const auto nesting = compute_nesting(cx, trial);
    for (auto& t : trial)
      t.nesting_parent = nesting.contains(t.id) ? nesting.at(t.id) : std::nullopt;
    if (!validate_disk_set(cx, trial).ok())
      continue;
    try {
      surger(cx, trial);
    } catch (const InputError&) {
      continue;
    }
    all = std::move(trial);
  }
  const auto nesting = compute_nesting(cx, all);
  for (auto& t : all)
    t.nesting_parent = nesting.contains(t.id) ? nesting.at(t.id) : std::nullopt;
  if (!validate_disk_set(cx, all).ok()) {
    all.clear();
  }
  out.disks = all;
  out.bullseye = eye;
  return out;
}

ScriptedCycle scripted_cycle(int n)
{
  if (n < 1)
    throw InputError("a cycle needs at least one step");
  // Key j is the sphere made of pieces 2j and 2j + 1.
  auto complex_with = [](int key_a, int key_b) {
    FlaggedComplex f;
    auto& cx = f.complex;
    cx.chambers = {Chamber{ChamberId{0}, {}, {}, {}}, Chamber{ChamberId{1}, {}, {}, {}}, Chamber{ChamberId{2}, {}, {}, {}}};
    int comp = 0;
    for (int key : {key_a, key_b}) {
      SurfaceComponent s{ComponentId{comp}, 0, {}};
      const PieceId p{2 * key}, q{2 * key + 1};
      s.cut.pieces = {Piece{p, 0, 1}, Piece{q, 0, 1}};
      s.cut.curves = {Curve{CurveId{key}, Slot{p, 0}, Slot{q, 0}}};
      cx.components.push_back(s);
      cx.incidence.push_back(Incidence{ComponentId{comp}, ChamberId{0}, ChamberId{comp + 1}});
      cx.chamber(ChamberId{0}).boundary.push_back(ComponentId{comp});
      cx.chamber(ChamberId{comp + 1}).boundary.push_back(ComponentId{comp});
      ++comp;
    }
    cx.sort_canonical();
    for (const auto& c : cx.chambers)
      f.flags[c.id] = Flag::Occupied;
    if (auto r = validate_complex(cx); !r.ok())
      throw ContractViolation("scripted cycle: " + r.issues.front().detail);
    return f;
  };
  auto sequence = [](int id, FlaggedComplex f) {
    DecompositionSequence s;
    s.id = id;
    s.stages = {std::move(f)};
    return s;
  };
  ScriptedCycle out;
  std::vector<DecompositionSequence> prim, sec;
  for (int i = 1; i <= n + 1; ++i) {
    prim.push_back(sequence(i, complex_with(2 * i - 2, 2 * i - 1)));
    out.primary.push_back(i);
  }
  for (int i = 1; i <= n; ++i) {
    sec.push_back(sequence(100 + i, complex_with(2 * i - 1, 2 * i)));
    out.secondary.push_back(100 + i);
  }
  for (const auto& s : prim)
    out.ledger.register_sequence(s);
  for (const auto& s : sec)
    out.ledger.register_sequence(s);
  for (int i = 0; i < n; ++i) {
    out.ledger = relate_sequences(prim[i], sec[i], std::move(out.ledger));
    out.ledger = relate_sequences(sec[i], prim[i + 1], std::move(out.ledger));
  }
  return out;
}

Scenario generate_instance(const FuzzConfig& config, std::size_t index)
{
  if (index >= config.samples)
    throw InputError(fmt::format("sample index {} is past the sample count {}", index, config.samples));
  auto rng = instance_rng(config.seed, index);
  Scenario s;
  s.complex = random_complex(rng, config.bounds, config.mode, config.mode == AmbientMode::Annotated);
  s.flags = random_flags(s.complex, rng, false);
  if (config.bounds.max_disks > 0)
    s.disk_sets.push_back(random_disk_set(s.complex, rng, config.bounds.max_disks));
  return s;
}

namespace {

using Check = PropertyResult (*)(const Scenario&, const FuzzConfig&);

PropertyResult fail(std::string detail, const Scenario& s)
{
  return PropertyResult{false, std::move(detail), s};
}

PropertyResult check_validate(const Scenario& s, const FuzzConfig&)
{
  const auto r = validate_full(s);
  if (!r.ok())
    return fail(fmt::format("{}: {}", r.issues.front().code, r.issues.front().detail), s);
  return {};
}

PropertyResult check_roundtrip(const Scenario& s, const FuzzConfig&)
{
  const auto text = serialize_scenario(s);
  const auto again = serialize_scenario(parse_scenario(text));
  if (again != text)
    return fail("serialized form changes after a parse", s);
  return {};
}

PropertyResult check_euler(const Scenario& s, const FuzzConfig&)
{
  const DiskSet disks = s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front();
  const auto raw = surger(s.complex, disks);
  if (auto e = oracle::check_euler(s.complex, disks, raw))
    return fail(*e, s);
  return {};
}

PropertyResult check_disky(const Scenario& s, const FuzzConfig&)
{
  const DiskSet disks = s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front();
  const auto raw = surger(s.complex, disks);
  if (auto e = oracle::check_disky(raw))
    return fail(*e, s);
  return {};
}

// Succession choices come from a stream seeded by the starting scene, so a
// serialized chain replays the same decompositions.
std::mt19937_64 succession_rng(const Scenario& s)
{
  Scenario base = s;
  base.disk_sets.clear();
  return std::mt19937_64(fnv1a(serialize_scenario(base)));
}

std::optional<std::string> stage_problem(const FlaggedComplex& before, const Decomposition& d, std::size_t step)
{
  if (!check_succession(before, d.raw, d.result).ok())
    return fmt::format("stage {} is not a consistent succession", step);
  const auto& cx = d.result.complex;
  if (cx.components.empty() && cx.chambers.size() == 1)
    return fmt::format("stage {} is a single chamber with no surface", step);
  if (const auto t = is_tiny(d.result); t != TinyVerdict::NotTiny)
    return fmt::format("stage {} is {}", step, t == TinyVerdict::Tiny ? "tiny" : "possibly tiny");
  return std::nullopt;
}

PropertyResult check_tiny_pullback(const Scenario& s, const FuzzConfig& config)
{
  FlaggedComplex cur = flagged_of(s);
  if (is_tiny(cur) != TinyVerdict::NotTiny)
    return fail("the starting scene is tiny", s);
  auto rng = succession_rng(s);
  for (std::size_t step = 0; step < s.disk_sets.size(); ++step) {
    const auto raw = surger(cur.complex, s.disk_sets[step]);
    Decomposition next;
    if (config.policy == Strategy::Enumerate) {
      const auto all = enumerate_successions(cur, raw);
      if (all.empty())
        return fail(fmt::format("stage {} has no consistent succession", step + 1), s);
      for (const auto& d : all)
        if (auto e = stage_problem(cur, d, step + 1))
          return fail(*e, s);
      next = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    } else {
      next = random_succession(cur, raw, rng);
      if (auto e = stage_problem(cur, next, step + 1))
        return fail(*e, s);
    }
    cur = next.result;
  }
  return {};
}

PropertyResult check_succession_property(const Scenario& s, const FuzzConfig&)
{
  const FlaggedComplex before = flagged_of(s);
  const DiskSet disks = s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front();
  const auto raw = surger(before.complex, disks);
  auto agree = [&](const Decomposition& d, const char* what) -> std::optional<std::string> {
    const auto engine = check_succession(before, d.raw, d.result);
    std::array<bool, 6> rules{true, true, true, true, true, true};
    bool flags_valid = true;
    for (const auto& v : split_views(before, d.raw, d.result.flags)) {
      const auto o = oracle::six_rules(v);
      for (int i = 0; i < 6; ++i)
        rules[i] = rules[i] && o.rules[i];
      flags_valid = flags_valid && o.flags_valid;
    }
    for (int i = 0; i < 6; ++i)
      if (engine.rule_ok(i + 1) != rules[i])
        return fmt::format("{}: rule {} is {} by the engine and {} by the literal rules", what, i + 1,
                           engine.rule_ok(i + 1) ? "met" : "broken", rules[i] ? "met" : "broken");
    if (engine.invalid_empty.empty() != flags_valid)
      return fmt::format("{}: engine and literal rules disagree on empty flags", what);
    return std::nullopt;
  };
  const auto def = default_succession(before, raw, SuccessionPolicy{});
  if (!check_succession(before, def.raw, def.result).ok())
    return fail("the default succession is inconsistent", s);
  if (auto e = agree(def, "default succession"))
    return fail(*e, s);
  const auto all = enumerate_successions(before, raw, 512);
  for (const auto& d : all) {
    if (!check_succession(before, d.raw, d.result).ok())
      return fail("an enumerated succession is inconsistent", s);
    if (auto e = agree(d, "enumerated succession"))
      return fail(*e, s);
  }
  // Arbitrary flaggings of the default result, consistent or not.
  auto rng = succession_rng(s);
  for (int trial = 0; trial < 8; ++trial) {
    Decomposition d = def;
    for (auto& [c, f] : d.result.flags)
      f = std::uniform_int_distribution<int>(0, 1)(rng) ? Flag::Empty : Flag::Occupied;
    if (auto e = agree(d, "reflagged succession"))
      return fail(*e, s);
  }
  return {};
}

const std::vector<AddDiskCase>& small_catalog()
{
  static const std::vector<AddDiskCase> cases = add_disk_catalog(2);
  return cases;
}

PropertyResult check_add_disk(const Scenario& s, const FuzzConfig&)
{
  if (s.disk_sets.size() != 2 || s.disk_sets[1].size() != 1)
    throw InputError("an add-disk scenario has the disk set and then the extra disk");
  const auto rep = classify_added_disk(flagged_of(s), s.disk_sets[0], s.disk_sets[1].front());
  const bool same = isomorphic(rep.c_ed, rep.c_de);
  if ((rep.outcome == AddDiskOutcome::Same) != same)
    return fail(fmt::format("outcome disagrees with the direct comparison (isomorphic: {})", same), s);
  if (rep.outcome == AddDiskOutcome::Unclassified)
    return fail("outcome is unclassified", s);
  if (!rep.case_consistent)
    return fail(fmt::format("outcome is not allowed by cases {}", fmt::join(rep.case_labels, ",")), s);
  if (rep.simultaneous_blank_left)
    return fail("simultaneous surgery differs by a blank bullseye", s);
  return {};
}

PropertyResult check_bullseye(const Scenario& s, const FuzzConfig&)
{
  if (!s.bullseye)
    throw InputError("a bullseye scenario needs a bullseye section");
  const DiskSet disks = s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front();
  const auto out = propagate_bullseye(flagged_of(s), disks, *s.bullseye);
  if (out.kind == BullseyeOutcome::Persists && out.k < s.bullseye->k)
    return fail(fmt::format("bullseye of {} spheres persists with only {}", s.bullseye->k, out.k), s);
  return {};
}

PropertyResult check_balance(const Scenario& s, const FuzzConfig&)
{
  if (!s.profile || !s.sphere)
    throw InputError("a balance scenario needs events and a sphere");
  if (balanced_levels(*s.profile).empty())
    return fail("the profile has no balanced level", s);
  const auto start = flagged_of(s);
  if (is_tiny(start) != TinyVerdict::NotTiny)
    return {};
  try {
    const auto run = guided_run(start, *s.profile, s.sphere->level, *s.sphere);
    if (run.status != RunStatus::Complete)
      return fail(fmt::format("guided run stuck after {} stages", run.sequence.stages.size()), s);
    if (run.certificates.empty())
      return fail(fmt::format("guided run ended after {} stages without a certificate", run.sequence.stages.size()),
                  s);
  } catch (const ContractViolation& e) {
    return fail(fmt::format("guided run broke an invariant: {}", e.what()), s);
  }
  return {};
}

PropertyResult check_band(const Scenario& s, const FuzzConfig&)
{
  if (!s.graphic)
    throw InputError("a band scenario needs a graphic");
  const auto engine = balanced_band(*s.graphic);
  const auto truth = oracle::band(*s.graphic);
  if (!truth.column_intervals || !truth.connected)
    return fail("the balanced band is not one connected interval per column", s);
  if (engine.column_intervals != truth.column_intervals || engine.connected != truth.connected)
    return fail("band report disagrees with the column scan", s);
  if (engine.path.empty())
    return fail("no path through the band", s);
  if (s.graphic->annulus && (!truth.essential_loop || !engine.essential_loop))
    return fail(fmt::format("no essential loop (engine {}, scan {})", engine.essential_loop, truth.essential_loop), s);
  return {};
}

struct Property {
  std::string name;
  Check check;  // null for properties without a scenario form
};

const std::vector<Property>& properties()
{
  static const std::vector<Property> ps{
      {"validate", check_validate},        {"roundtrip", check_roundtrip},
      {"euler", check_euler},              {"disky", check_disky},
      {"tiny-pullback", check_tiny_pullback}, {"succession", check_succession_property},
      {"add-disk", check_add_disk},        {"bullseye", check_bullseye},
      {"balance", check_balance},          {"band", check_band},
      {"annulus-band", check_band},        {"quadrants", nullptr},
      {"ledger", nullptr},
  };
  return ps;
}

const Property& property(const std::string& name)
{
  for (const auto& p : properties())
    if (p.name == name)
      return p;
  throw InputError(fmt::format("unknown property \"{}\"", name));
}

Scenario make_scenario(const FuzzConfig& config, std::size_t index, std::mt19937_64& rng)
{
  const auto& name = config.property;
  const auto& b = config.bounds;
  Scenario s;
  if (name == "validate" || name == "roundtrip") {
    FuzzConfig c = config;
    c.samples = std::max(c.samples, index + 1);
    return generate_instance(c, index);
  }
  if (name == "euler" || name == "disky") {
    FuzzBounds wide = b;
    wide.max_disks = std::max(1, b.max_disks);
    s.complex = random_complex(rng, wide, config.mode, config.mode == AmbientMode::Annotated);
    s.disk_sets.push_back(random_disk_set(s.complex, rng, b.max_disks));
    return s;
  }
  if (name == "tiny-pullback") {
    FuzzBounds wide = b;
    wide.max_disks = std::max(1, b.max_disks);
    s.complex = random_complex(rng, wide, config.mode, true);
    s.flags = random_flags(s.complex, rng, true);
    const int length = uniform(rng, 1, std::max(1, b.max_sequence));
    auto srng = succession_rng(s);
    FlaggedComplex cur = flagged_of(s);
    for (int step = 0; step < length; ++step) {
      auto disks = random_disk_set(cur.complex, rng, b.max_disks);
      if (disks.empty())
        break;
      const auto raw = surger(cur.complex, disks);
      Decomposition next;
      if (config.policy == Strategy::Enumerate) {
        const auto all = enumerate_successions(cur, raw);
        if (all.empty())
          break;
        next = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(srng)];
      } else {
        next = random_succession(cur, raw, srng);
      }
      s.disk_sets.push_back(std::move(disks));
      cur = next.result;
    }
    return s;
  }
  if (name == "succession") {
    FuzzBounds wide = b;
    wide.max_disks = std::max(1, b.max_disks);
    s.complex = random_complex(rng, wide, config.mode, true);
    s.flags = random_flags(s.complex, rng, false);
    s.disk_sets.push_back(random_disk_set(s.complex, rng, b.max_disks));
    return s;
  }
  if (name == "add-disk") {
    const auto& cases = small_catalog();
    const auto& c = cases[std::uniform_int_distribution<std::size_t>(0, cases.size() - 1)(rng)];
    s.complex = c.base.complex;
    s.flags = c.base.flags;
    s.disk_sets = {c.disks, {c.extra}};
    return s;
  }
  if (name == "bullseye") {
    const auto inst = random_bullseye_instance(rng, b);
    s.complex = inst.base.complex;
    s.flags = inst.base.flags;
    s.disk_sets = {inst.disks};
    s.bullseye = inst.bullseye;
    return s;
  }
  if (name == "balance") {
    const auto inst = random_guided_instance(rng, b);
    s.complex = inst.start.complex;
    s.flags = inst.start.flags;
    s.profile = inst.profile;
    s.sphere = inst.guide;
    return s;
  }
  if (name == "band" || name == "annulus-band") {
    s.graphic = random_graphic(rng, 12, 12, name == "annulus-band");
    return s;
  }
  throw InputError(fmt::format("property \"{}\" has no scenario form", name));
}

const std::vector<QuadrantConfig>& all_vertex_configs()
{
  static const std::vector<QuadrantConfig> configs = [] {
    std::vector<QuadrantConfig> out;
    for (auto shape : kVertexShapes) {
      auto c = enumerate_vertex_configs(shape, 1);
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }();
  return configs;
}

PropertyResult check_quadrants(std::size_t index)
{
  const auto& configs = all_vertex_configs();
  const auto& c = configs[index % configs.size()];
  const auto rep = classify_vertex(c);
  const auto truth = oracle::quadrants(c);
  if (rep.labels != truth.labels || rep.circles != truth.circles)
    return PropertyResult{false,
                          fmt::format("{} configuration {}: labels {}{}{}{} against {}{}{}{}", shape_name(c.shape),
                                      index % configs.size(), rep.labels[0].str(), rep.labels[1].str(),
                                      rep.labels[2].str(), rep.labels[3].str(), truth.labels[0].str(),
                                      truth.labels[1].str(), truth.labels[2].str(), truth.labels[3].str()),
                          std::nullopt};
  return {};
}

PropertyResult check_ledger(std::mt19937_64& rng)
{
  // Sequences whose only stage holds occupied balls drawn from a shared pool.
  const int count = uniform(rng, 2, 8), pool = uniform(rng, 2, 10);
  std::vector<DecompositionSequence> seqs;
  EquivalenceLedger ledger;
  for (int i = 0; i < count; ++i) {
    std::vector<int> keys;
    for (int k = 0; k < pool; ++k)
      if (chance(rng, 4))
        keys.push_back(k);
    FlaggedComplex f;
    auto& cx = f.complex;
    cx.chambers.push_back(Chamber{ChamberId{0}, {}, {}, {}});
    for (int j = 0; j < static_cast<int>(keys.size()); ++j) {
      SurfaceComponent s{ComponentId{j}, 0, {}};
      const PieceId p{2 * keys[j]}, q{2 * keys[j] + 1};
      s.cut.pieces = {Piece{p, 0, 1}, Piece{q, 0, 1}};
      s.cut.curves = {Curve{CurveId{keys[j]}, Slot{p, 0}, Slot{q, 0}}};
      cx.components.push_back(s);
      cx.chambers.push_back(Chamber{ChamberId{j + 1}, {ComponentId{j}}, {}, {}});
      cx.chamber(ChamberId{0}).boundary.push_back(ComponentId{j});
      cx.incidence.push_back(Incidence{ComponentId{j}, ChamberId{0}, ChamberId{j + 1}});
    }
    cx.sort_canonical();
    for (const auto& c : cx.chambers)
      f.flags[c.id] = Flag::Occupied;
    DecompositionSequence seq;
    seq.id = i;
    seq.stages = {f};
    seqs.push_back(seq);
    ledger.register_sequence(seq);
  }
  for (int r = uniform(rng, 0, 2 * count); r > 0; --r) {
    const int a = uniform(rng, 0, count - 1), b = uniform(rng, 0, count - 1);
    if (a != b)
      ledger = relate_sequences(seqs[a], seqs[b], std::move(ledger));
  }
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) {
      const auto ans = are_equivalent(ledger, a, b);
      if (ans.equivalent != oracle::ledger_connected(ledger, a, b))
        return PropertyResult{false, fmt::format("sequences {} and {}: ledger and union-find disagree", a, b),
                              std::nullopt};
      if (ans.equivalent != (ledger.find(a) == ledger.find(b)))
        return PropertyResult{false, fmt::format("sequences {} and {}: witness chain and classes disagree", a, b),
                              std::nullopt};
      if (ans.equivalent && !replay_chain(ledger, ans.chain, a, b))
        return PropertyResult{false, fmt::format("sequences {} and {}: witness chain does not replay", a, b),
                              std::nullopt};
    }
  return {};
}

}  // namespace

const std::vector<std::string>& property_names()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : properties())
      out.push_back(p.name);
    return out;
  }();
  return names;
}

bool known_property(const std::string& name)
{
  const auto& n = property_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

PropertyResult replay(const std::string& name, const Scenario& s, const FuzzConfig& config)
{
  const auto& p = property(name);
  if (!p.check)
    throw InputError(fmt::format("property \"{}\" has no scenario form to replay", name));
  if (name != "validate") {
    if (auto r = validate_full(s); !r.ok())
      throw InputError(fmt::format("scenario is invalid: {} ({})", r.issues.front().code, r.issues.front().detail));
  }
  try {
    return p.check(s, config);
  } catch (const ContractViolation& e) {
    return fail(fmt::format("engine invariant broken: {}", e.what()), s);
  }
}

PropertyResult check_sample(const FuzzConfig& config, std::size_t index)
{
  const auto& p = property(config.property);
  auto rng = instance_rng(config.seed, index);
  if (config.property == "quadrants")
    return check_quadrants(index);
  if (config.property == "ledger")
    return check_ledger(rng);
  const Scenario s = make_scenario(config, index, rng);
  try {
    return p.check(s, config);
  } catch (const ContractViolation& e) {
    return fail(fmt::format("engine invariant broken: {}", e.what()), s);
  } catch (const InputError& e) {
    return fail(fmt::format("generated scenario rejected: {}", e.what()), s);
  }
}

unsigned worker_count(const FuzzConfig& config)
{
  unsigned n = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CHAMBER_CALCULUS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1)
      n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

FuzzReport run_fuzz(const FuzzConfig& config)
{
  check_bounds(config.bounds);
  property(config.property);
  const auto start = std::chrono::steady_clock::now();
  FuzzReport rep;
  rep.property = config.property;
  std::vector<char> passed(config.samples, 0);
  std::atomic<std::size_t> next{0};
  std::mutex lock;
  std::optional<std::size_t> first;
  PropertyResult first_result;
  std::optional<std::string> error;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.samples)
        return;
      PropertyResult r;
      try {
        r = check_sample(config, i);
      } catch (const std::exception& e) {
        std::lock_guard g(lock);
        if (!error)
          error = e.what();
        return;
      }
      passed[i] = r.pass;
      if (!r.pass) {
        std::lock_guard g(lock);
        if (!first || i < *first) {
          first = i;
          first_result = std::move(r);
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::min<std::size_t>(worker_count(config), std::max<std::size_t>(1, config.samples));
    for (unsigned t = 0; t < n; ++t)
      pool.emplace_back(work);
  }
  if (error)
    throw InputError(*error);
  for (char p : passed)
    (p ? rep.passes : rep.failures) += 1;
  rep.first_failure = first;
  if (first) {
    rep.detail = first_result.detail;
    rep.counterexample = first_result.counterexample;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chamber
