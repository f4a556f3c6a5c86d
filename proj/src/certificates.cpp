#include "chamber/certificates.hpp"

#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace chamber {

namespace {

char tri_char(Tri t)
{
  switch (t) {
    case Tri::No:
      return 'n';
    case Tri::Yes:
      return 'y';
    case Tri::Unknown:
      return 'u';
  }
  return '?';
}

// Components lying strictly inside a set of chambers.
std::vector<ComponentId> interior_components(const ChamberComplex& cx, const std::set<ChamberId>& side)
{
  std::vector<ComponentId> out;
  for (const auto& inc : cx.incidence)
    if (side.contains(inc.side_a) && side.contains(inc.side_b))
      out.push_back(inc.component);
  return out;
}

std::set<PieceId> original_pieces(const SurfaceComponent& comp, int bound)
{
  std::set<PieceId> out;
  for (const auto& p : comp.cut.pieces)
    if (p.id.value < bound)
      out.insert(p.id);
  return out;
}

bool has_component_with_pieces(const ChamberComplex& cx, const std::set<PieceId>& pieces, int bound)
{
  return std::any_of(cx.components.begin(), cx.components.end(),
                     [&](const SurfaceComponent& c) { return original_pieces(c, bound) == pieces; });
}

}  // namespace

std::string piece_signature(const SurfaceComponent& component, int piece_bound)
{
  std::vector<int> ids;
  int extra = 0;
  for (const auto& p : component.cut.pieces) {
    if (p.id.value < piece_bound)
      ids.push_back(p.id.value);
    else
      ++extra;
  }
  std::sort(ids.begin(), ids.end());
  return fmt::format("{}+{}", fmt::join(ids, ","), extra);
}

std::vector<Certificate> certificates(const FlaggedComplex& flagged, const CertificateOptions& options,
                                      const std::optional<GuideWitness>& guide)
{
  const auto& cx = flagged.complex;
  std::vector<Certificate> out;
  for (const auto& ch : cx.chambers) {
    const auto a = effective_annotation(cx, ch);
    const bool occupied = flagged.flags.at(ch.id) == Flag::Occupied;
    if (occupied && a.is_ball == Tri::Yes) {
      const auto& g = cx.component(ch.boundary.front());
      out.push_back({CertificateKind::OccupiedBallBoundary, ch.id, g.id, std::nullopt,
                     "S:" + piece_signature(g, options.piece_bound)});
    }
    if (options.solid_torus_certifies && occupied && a.is_solid_torus == Tri::Yes) {
      const auto& t = cx.component(ch.boundary.front());
      out.push_back({CertificateKind::OccupiedSolidTorus, ch.id, t.id, std::nullopt,
                     "T:" + piece_signature(t, options.piece_bound)});
    }
    if (cx.mode == AmbientMode::Annotated && a.is_reducible == Tri::Yes) {
      std::vector<std::string> sigs;
      for (auto b : ch.boundary)
        sigs.push_back(piece_signature(cx.component(b), options.piece_bound));
      std::sort(sigs.begin(), sigs.end());
      out.push_back({CertificateKind::AnnotatedReducible, ch.id, std::nullopt, std::nullopt,
                     fmt::format("C:{}", fmt::join(sigs, "|"))});
    }
  }
  for (const auto& g : cx.components) {
    if (g.genus != 0)
      continue;
    const auto& inc = cx.incidence_of(g.id);
    const auto sa = side_of(cx, g.id, inc.side_a);
    const auto sb = side_of(cx, g.id, inc.side_b);
    if (interior_components(cx, sa).empty() || interior_components(cx, sb).empty())
      continue;
    const std::string key = "S:" + piece_signature(g, options.piece_bound);
    out.push_back({CertificateKind::ReducingSphere, inc.side_a, g.id, std::nullopt, key});
    out.push_back({CertificateKind::ReducingSphere, inc.side_b, g.id, std::nullopt, key});
  }
  if (guide && !guide->above.empty() && !guide->below.empty()) {
    if (!cx.find_chamber(guide->chamber))
      throw InputError(fmt::format("guide witness names unknown chamber {}", guide->chamber.value));
    out.push_back({CertificateKind::ReducingSphere, guide->chamber, std::nullopt, guide->guide_id,
                   fmt::format("G:{}", guide->guide_id)});
  }
  return out;
}

bool certifies(const FlaggedComplex& flagged, const CertificateOptions& options,
               const std::optional<GuideWitness>& guide)
{
  return !certificates(flagged, options, guide).empty();
}

std::string canonical_form(const FlaggedComplex& flagged, const CanonicalOptions& options)
{
  const auto& cx = flagged.complex;
  std::map<ChamberId, std::string> label;
  for (const auto& ch : cx.chambers) {
    if (options.ignore && *options.ignore == ch.id) {
      label[ch.id] = "*";
      continue;
    }
    auto it = flagged.flags.find(ch.id);
    std::string s(1, it == flagged.flags.end() ? '?' : (it->second == Flag::Empty ? 'E' : 'O'));
    if (options.annotations) {
      const auto a = effective_annotation(cx, ch);
      s += tri_char(a.is_ball);
      s += tri_char(a.is_handlebody);
    }
    label[ch.id] = s;
  }
  auto encode = [&](auto&& self, ChamberId at, std::optional<ComponentId> via) -> std::string {
    std::vector<std::string> kids;
    for (auto b : cx.chamber(at).boundary) {
      if (via && b == *via)
        continue;
      kids.push_back(fmt::format("({}:{})", cx.component(b).genus, self(self, cx.across(b, at), b)));
    }
    std::sort(kids.begin(), kids.end());
    return fmt::format("[{}{}]", label.at(at), fmt::join(kids, ""));
  };
  std::string best;
  for (const auto& ch : cx.chambers) {
    auto s = encode(encode, ch.id, std::nullopt);
    if (best.empty() || s < best)
      best = std::move(s);
  }
  return best;
}

bool isomorphic(const FlaggedComplex& a, const FlaggedComplex& b)
{
  return a.complex.mode == b.complex.mode && canonical_form(a) == canonical_form(b);
}

InsertedBullseye insert_bullseye(const FlaggedComplex& flagged, const Bullseye& eye)
{
  if (!flagged.complex.find_chamber(eye.host))
    throw InputError(fmt::format("bullseye host {} does not exist", eye.host.value));
  if (eye.k < 0 || (eye.blank && eye.k < 1))
    throw InputError("a bullseye needs k >= 0, and a blank one at least one sphere");
  InsertedBullseye out{flagged, eye};
  auto& cx = out.complex.complex;
  auto& rec = out.bullseye;
  rec.spheres.clear();
  rec.chambers.clear();
  rec.sphere_curves.clear();
  int piece = next_piece_id(cx), curve = next_curve_id(cx);
  int comp = 0, chamber = 0;
  for (const auto& c : cx.components)
    comp = std::max(comp, c.id.value + 1);
  for (const auto& c : cx.chambers)
    chamber = std::max(chamber, c.id.value + 1);

  std::vector<ComponentId> surfaces;
  for (int i = 0; i < eye.k; ++i) {
    SurfaceComponent s{ComponentId{comp++}, 0, {}};
    const PieceId p{piece++}, q{piece++};
    s.cut.pieces = {Piece{p, 0, 1}, Piece{q, 0, 1}};
    const CurveId k{curve++};
    s.cut.curves = {Curve{k, Slot{p, 0}, Slot{q, 0}}};
    cx.components.push_back(s);
    surfaces.push_back(s.id);
    rec.spheres.push_back(s.id);
    rec.sphere_curves.push_back(k);
  }
  if (!eye.blank) {
    SurfaceComponent t{ComponentId{comp++}, 1, {}};
    const PieceId p{piece++}, q{piece++};
    t.cut.pieces = {Piece{p, 0, 3}, Piece{q, 0, 1}};
    const CurveId m{curve++}, e{curve++};
    t.cut.curves = {Curve{m, Slot{p, 0}, Slot{p, 1}}, Curve{e, Slot{p, 2}, Slot{q, 0}}};
    cx.components.push_back(t);
    surfaces.push_back(t.id);
    rec.torus = t.id;
    rec.torus_meridian = m;
    rec.torus_trivial = e;
  }

  std::vector<ChamberId> regions{eye.host};
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    Chamber ch{ChamberId{chamber++}, {}, {}, {}};
    const bool innermost = i + 1 == surfaces.size();
    ch.boundary.push_back(surfaces[i]);
    if (!innermost)
      ch.boundary.push_back(surfaces[i + 1]);
    Flag f = Flag::Occupied;
    if (innermost && !eye.blank) {
      ch.annotation = eye.torus_side;
      f = eye.torus_side_flag;
    } else if (innermost) {
      ch.annotation = TopAnnotation{Tri::Yes, Tri::Yes, Tri::No, Tri::No};
    }
    cx.chambers.push_back(ch);
    out.complex.flags[ch.id] = f;
    cx.incidence.push_back(Incidence{surfaces[i], regions.back(), ch.id});
    regions.push_back(ch.id);
    rec.chambers.push_back(ch.id);
  }

  Chamber& host = cx.chamber(eye.host);
  host.boundary.push_back(surfaces.front());
  if (cx.component(surfaces.front()).genus == 0)
    host.punctures.push_back({surfaces.front()});
  else
    host.annotation = TopAnnotation{}, host.punctures.clear();
  out.complex.flags[eye.host] = Flag::Occupied;
  cx.sort_canonical();
  if (auto r = validate_complex(cx); !r.ok())
    throw ContractViolation("bullseye insertion broke the complex: " + r.issues.front().code);
  return out;
}

namespace {

FlaggedComplex remove_chain(const FlaggedComplex& larger, const std::vector<ChamberId>& chain,
                            const std::vector<ComponentId>& surfaces, ChamberId host)
{
  FlaggedComplex out = larger;
  auto& cx = out.complex;
  std::set<ChamberId> gone(chain.begin(), chain.end());
  std::set<ComponentId> cut(surfaces.begin(), surfaces.end());
  std::erase_if(cx.chambers, [&](const Chamber& c) { return gone.contains(c.id); });
  for (auto c : chain)
    out.flags.erase(c);
  std::erase_if(cx.components, [&](const SurfaceComponent& c) { return cut.contains(c.id); });
  std::erase_if(cx.incidence, [&](const Incidence& i) { return cut.contains(i.component); });
  Chamber& h = cx.chamber(host);
  std::erase_if(h.boundary, [&](ComponentId c) { return cut.contains(c); });
  for (auto& grp : h.punctures)
    std::erase_if(grp, [&](ComponentId c) { return cut.contains(c); });
  std::erase_if(h.punctures, [](const auto& g) { return g.empty(); });
  return out;
}

}  // namespace

std::optional<BullseyeMatch> bullseye_difference(const FlaggedComplex& larger, const FlaggedComplex& smaller,
                                                 std::optional<bool> blank)
{
  if (larger.complex.mode != smaller.complex.mode)
    return std::nullopt;
  if (blank.value_or(true) && isomorphic(larger, smaller))
    return BullseyeMatch{0, true, larger.complex.chambers.front().id, {}};
  std::set<std::string> targets;
  for (const auto& c : smaller.complex.chambers)
    targets.insert(canonical_form(smaller, {c.id, true}));

  const auto& cx = larger.complex;
  std::optional<BullseyeMatch> best;
  for (const auto& leaf : cx.chambers) {
    if (leaf.boundary.size() != 1)
      continue;
    const ComponentId first = leaf.boundary.front();
    const int g = cx.component(first).genus;
    const bool is_blank = g == 0;
    if (g > 1 || (blank && *blank != is_blank))
      continue;
    std::vector<ChamberId> chain{leaf.id};
    std::vector<ComponentId> surfaces{first};
    int spheres = is_blank ? 1 : 0;
    ChamberId cur = cx.across(first, leaf.id);
    while (true) {
      auto reduced = remove_chain(larger, chain, surfaces, cur);
      if (targets.contains(canonical_form(reduced, {cur, true})) && (!best || spheres < best->k))
        best = BullseyeMatch{spheres, is_blank, cur, chain};
      const auto& ch = cx.chamber(cur);
      if (ch.boundary.size() != 2)
        break;
      const ComponentId next = ch.boundary[0] == surfaces.back() ? ch.boundary[1] : ch.boundary[0];
      if (cx.component(next).genus != 0)
        break;
      chain.push_back(cur);
      surfaces.push_back(next);
      ++spheres;
      cur = cx.across(next, cur);
    }
  }
  return best;
}

BullseyeOutcome propagate_bullseye(const FlaggedComplex& base, const DiskSet& disks, const Bullseye& bullseye)
{
  const auto inserted = insert_bullseye(base, bullseye);
  const auto& c = inserted.complex;
  const auto& rec = inserted.bullseye;
  const int bound = next_piece_id(base.complex);

  std::set<ComponentId> bcomps(rec.spheres.begin(), rec.spheres.end());
  if (rec.torus)
    bcomps.insert(*rec.torus);
  std::set<ChamberId> bchambers(rec.chambers.begin(), rec.chambers.end());
  DiskSet on_bullseye, elsewhere;
  for (const auto& d : disks) {
    if (bcomps.contains(d.component) || bchambers.contains(d.chamber)) {
      on_bullseye.push_back(d);
    } else {
      DiskAttachment e = d;
      std::erase_if(e.carries, [&](PieceId p) { return p.value >= bound; });
      elsewhere.push_back(e);
    }
  }
  if (auto r = validate_disk_set(c.complex, disks); !r.ok())
    throw InputError("disks do not fit the bullseye complex: " + r.issues.front().detail);

  // Spheres cut out of the bullseye that split the host's own boundary.
  const RawComplex q = surger(c.complex, on_bullseye);
  for (const auto& k : q.raw.components) {
    if (k.genus != 0 || original_pieces(k, bound).size() == k.cut.pieces.size())
      continue;
    const auto& inc = q.raw.incidence_of(k.id);
    auto has_base = [&](ChamberId from) {
      const auto side = side_of(q.raw, k.id, from);
      for (const auto& i : q.raw.incidence) {
        if (i.component == k.id || !(side.contains(i.side_a) || side.contains(i.side_b)))
          continue;
        const auto& comp = q.raw.component(i.component);
        if (original_pieces(comp, bound).size() == comp.cut.pieces.size())
          return true;
      }
      return false;
    };
    if (has_base(inc.side_a) && has_base(inc.side_b))
      return BullseyeOutcome{BullseyeOutcome::HostReducible, 0, false, 0};
  }

  const auto dec = decompose(c, disks);
  const auto options = enumerate_successions(base, surger(base.complex, elsewhere));
  // A base succession that keeps one of its own spheres around an occupied
  // ball can mimic a shorter bullseye; the matching succession is the one that
  // agrees with the result away from the bullseye, which leaves the most spheres.
  std::optional<BullseyeMatch> best;
  for (const auto& o : options) {
    auto m = bullseye_difference(dec.result, o.result);
    if (m && (!best || m->k > best->k))
      best = m;
  }
  if (!best)
    return {};

  const ChamberId y = rec.chambers.back();
  auto rems = dec.raw.raw_remnants(y);
  std::sort(rems.begin(), rems.end());
  if (rems.empty())
    throw ContractViolation("torus side lost all of its remnants");
  std::optional<ChamberId> point;
  for (const auto& [cur, region] : dec.raw.region)
    if (region.contains(rems.front()))
      point = cur;
  if (!point)
    throw ContractViolation("torus-side point is not in any chamber");
  const auto tree = derive_chamber_tree(dec.result.complex);
  const int crossings = static_cast<int>(tree.path(best->host, *point).size()) - 1;
  return BullseyeOutcome{BullseyeOutcome::Persists, best->k, best->blank, crossings};
}

std::optional<DiskAttachment> transport_disk(const RawComplex& step, const DiskAttachment& disk)
{
  auto comp = step.complex.component_of_curve(disk.curve);
  if (!comp)
    return std::nullopt;
  const auto& inc = step.raw.incidence_of(*comp);
  std::optional<ChamberId> raw_side;
  for (auto s : {inc.side_a, inc.side_b})
    if (step.remnant.at(s) == disk.chamber)
      raw_side = s;
  if (!raw_side)
    throw InputError(fmt::format("disk {} is not next to its curve", disk.id.value));
  for (const auto& [cur, region] : step.region)
    if (region.contains(*raw_side)) {
      DiskAttachment out = disk;
      out.component = *comp;
      out.chamber = cur;
      // Whatever sat on the slot-a side stays there: every part of a carried
      // surface, and the parts of the disk's own surface on that side.
      std::set<PieceId> carried, marked;
      for (auto p : disk.carries)
        if (auto old = step.before.component_of_piece(p))
          for (const auto& q : step.before.component(*old).cut.pieces)
            marked.insert(q.id);
      if (auto old = step.before.component_of_curve(disk.curve))
        if (auto sa = side_a_pieces(step.before.component(*old).cut, disk.curve))
          marked.insert(sa->begin(), sa->end());
      for (const auto& y : step.complex.components) {
        if (y.id == *comp)
          continue;
        for (const auto& p : y.cut.pieces)
          if (marked.contains(p.id)) {
            carried.insert(y.cut.pieces.front().id);
            break;
          }
      }
      out.carries.assign(carried.begin(), carried.end());
      return out;
    }
  throw ContractViolation(fmt::format("no chamber holds the remnant of disk {}", disk.id.value));
}

DiskSet transport_disks(const RawComplex& step, const DiskSet& disks)
{
  DiskSet out;
  for (const auto& d : disks)
    if (auto t = transport_disk(step, d))
      out.push_back(*t);
  const auto nesting = compute_nesting(step.complex, out);
  for (auto& d : out)
    if (auto it = nesting.find(d.id); it != nesting.end())
      d.nesting_parent = it->second;
    else
      d.nesting_parent.reset();
  return out;
}

namespace {

DiskSet with_nesting(const ChamberComplex& cx, DiskSet disks)
{
  const auto nesting = compute_nesting(cx, disks);
  for (auto& d : disks)
    if (auto it = nesting.find(d.id); it != nesting.end())
      d.nesting_parent = it->second;
    else
      d.nesting_parent.reset();
  return disks;
}

std::set<std::string> reducing_keys(const FlaggedComplex& f)
{
  std::set<std::string> out;
  for (const auto& c : certificates(f))
    if (c.kind == CertificateKind::ReducingSphere || c.kind == CertificateKind::AnnotatedReducible)
      out.insert(c.key);
  return out;
}

std::string case_two_label(bool inside, int scars)
{
  if (inside)
    return scars == 0 ? "2b" : scars == 2 ? "2c" : "2d";
  return scars == 0 ? "2a" : scars == 2 ? "2e" : "2f";
}

}  // namespace

bool outcome_allowed(const std::string& label, AddDiskOutcome outcome, int k)
{
  using O = AddDiskOutcome;
  if (outcome == O::Unclassified)
    return false;
  // Agreement of the two orders, or a reducing sphere, is acceptable in every case.
  if (outcome == O::Same || outcome == O::Reduces)
    return true;
  if (label == "1a")
    return outcome == O::Reduces || outcome == O::BullseyeRight;
  if (label == "1b")
    return outcome == O::Reduces;
  if (label == "2a" || label == "2e")
    return false;
  if (label == "2b")
    return outcome == O::BullseyeRight && k >= 1;
  if (label == "2c")
    return outcome == O::BullseyeRight;
  if (label == "2d" || label == "2f")
    return outcome == O::BlankBullseyeLeft;
  throw InputError("unknown case label " + label);
}

std::optional<std::set<PieceId>> disk_side_a(const ChamberComplex& cx, const DiskAttachment& d)
{
  const auto* comp = cx.find_component(d.component);
  if (!comp || !comp->cut.find_curve(d.curve))
    throw InputError(fmt::format("disk {} names a curve off its component", d.id.value));
  auto sa = side_a_pieces(comp->cut, d.curve);
  if (!sa)
    return std::nullopt;
  for (auto p : d.carries)
    if (auto y = cx.component_of_piece(p); y && *y != d.component)
      for (const auto& q : cx.component(*y).cut.pieces)
        sa->insert(q.id);
  return sa;
}

bool disks_cross(const ChamberComplex& cx, const DiskAttachment& d, const DiskAttachment& e)
{
  if (d.chamber != e.chamber)
    return false;
  const auto da = disk_side_a(cx, d), ea = disk_side_a(cx, e);
  if (!da || !ea)
    return false;
  bool cells[2][2] = {{false, false}, {false, false}};
  for (auto y : cx.chamber(d.chamber).boundary)
    for (const auto& p : cx.component(y).cut.pieces)
      cells[da->contains(p.id)][ea->contains(p.id)] = true;
  return cells[0][0] && cells[0][1] && cells[1][0] && cells[1][1];
}

AddDiskReport classify_added_disk(const FlaggedComplex& base, const DiskSet& disks, const DiskAttachment& extra)
{
  for (const auto& d : disks) {
    if (d.id == extra.id || d.curve == extra.curve)
      throw InputError("the added disk must differ from every disk of the family");
    if (disks_cross(base.complex, d, extra))
      throw InputError(fmt::format("disks {} and {} cannot be disjoint: their sides cross", d.id.value, extra.id.value));
  }
  const auto& cx = base.complex;
  const int bound = next_piece_id(cx);
  AddDiskReport rep;

  const auto dec_d = decompose(base, disks);
  const auto dec_e = decompose(base, {extra});
  rep.c_d = dec_d.result;
  rep.c_e = dec_e.result;
  if (auto e = transport_disk(dec_d.raw, extra)) {
    auto moved = with_nesting(dec_d.result.complex, {*e});
    rep.c_de = decompose(dec_d.result, moved).result;
  } else {
    rep.c_de = rep.c_d;
  }
  rep.c_ed = decompose(dec_e.result, transport_disks(dec_e.raw, disks)).result;
  DiskSet both = disks;
  both.push_back(extra);
  both = with_nesting(cx, both);
  const auto dec_both = decompose(base, both);
  rep.c_simultaneous = dec_both.result;

  // Case reading.
  const auto& ech = cx.chamber(extra.chamber);
  const auto ea = effective_annotation(cx, ech);
  const auto cls = classify_curve(cx.component(extra.component), extra.curve);
  const bool case_one = base.flags.at(extra.chamber) == Flag::Empty && ea.is_solid_torus == Tri::Yes &&
                        cls.kind == CurveKind::EssentialNonseparating;
  bool host_reduces = false;
  if (case_one) {
    const ComponentId t = extra.component;
    const ChamberId outer = cx.across(t, extra.chamber);
    const auto& n = cx.chamber(outer);
    bool in_ball = n.boundary.size() == 1 ||
                   (n.boundary.size() == 2 &&
                    cx.component(n.boundary[0] == t ? n.boundary[1] : n.boundary[0]).genus == 0);
    // An outside disk with trivial boundary splits the outer chamber. When the
    // side holding the torus is bounded by the torus and at most the new sphere,
    // that sphere bounds a ball around the torus. A disk on the torus itself whose
    // two sides both hold other surfaces gives a reducing sphere instead.
    for (const auto& d : disks) {
      if (d.chamber != outer ||
          classify_curve(cx.component(d.component), d.curve).kind != CurveKind::Inessential)
        continue;
      const auto cut = surger(cx, {d});
      auto is_torus = [&](ComponentId c) {
        return d.component == t ? cut.raw.component(c).genus == 1 && !cx.find_component(c) : c == t;
      };
      std::size_t torus_side = 0, cap_side = 0;
      for (auto r : cut.raw_remnants(outer)) {
        const auto& ch = cut.raw.chamber(r);
        const bool facing_torus = std::any_of(ch.boundary.begin(), ch.boundary.end(), is_torus);
        (facing_torus ? torus_side : cap_side) = ch.boundary.size();
        if (facing_torus && d.component != t && ch.boundary.size() == 2 &&
            std::all_of(ch.boundary.begin(), ch.boundary.end(),
                        [&](ComponentId c) { return c == t || cut.raw.component(c).genus == 0; }))
          in_ball = true;
      }
      if (d.component != t)
        continue;
      if (torus_side == 1)
        in_ball = true;
      if (torus_side > 1 && cap_side > 1)
        host_reduces = true;
    }
    rep.case_labels.push_back(in_ball ? "1a" : "1b");
  } else {
    const auto& raw = dec_both.raw;
    const ScarRecord* escar = nullptr;
    for (const auto& s : raw.scars)
      if (s.disk == extra.id)
        escar = &s;
    for (const auto& g : raw.raw.components) {
      if (g.genus != 0)
        continue;
      const auto pieces = original_pieces(g, bound);
      if (has_component_with_pieces(rep.c_ed.complex, pieces, bound) ==
          has_component_with_pieces(rep.c_de.complex, pieces, bound))
        continue;
      const auto& inc = raw.raw.incidence_of(g.id);
      const int scars = (escar->host_a == g.id) + (escar->host_b == g.id);
      for (auto side : {inc.side_a, inc.side_b}) {
        const bool inside = side_of(raw.raw, g.id, side).contains(escar->handle_chamber);
        auto label = case_two_label(inside, scars);
        if (std::find(rep.case_labels.begin(), rep.case_labels.end(), label) == rep.case_labels.end())
          rep.case_labels.push_back(label);
      }
    }
    if (rep.case_labels.empty())
      rep.case_labels.push_back("2a");
  }

  if (isomorphic(rep.c_ed, rep.c_de)) {
    rep.outcome = AddDiskOutcome::Same;
  } else if (auto m = bullseye_difference(rep.c_d, rep.c_ed)) {
    rep.outcome = AddDiskOutcome::BullseyeRight;
    rep.k = m->k;
    rep.blank = m->blank;
  } else if (auto m2 = bullseye_difference(rep.c_ed, rep.c_de, true)) {
    rep.outcome = AddDiskOutcome::BlankBullseyeLeft;
    rep.k = m2->k;
    rep.blank = true;
  } else {
    const auto before = reducing_keys(base);
    bool fresh = false;
    for (const auto& key : reducing_keys(rep.c_e))
      fresh = fresh || !before.contains(key);
    if (fresh || host_reduces)
      rep.outcome = AddDiskOutcome::Reduces;
  }
  if (auto m = bullseye_difference(rep.c_ed, rep.c_simultaneous, true); m && m->k >= 1)
    rep.simultaneous_blank_left = !isomorphic(rep.c_ed, rep.c_simultaneous);
  rep.case_consistent = std::any_of(rep.case_labels.begin(), rep.case_labels.end(),
                                    [&](const std::string& l) { return outcome_allowed(l, rep.outcome, rep.k); });
  return rep;
}

std::vector<Certificate> DecompositionSequence::stage_certificates(std::size_t stage) const
{
  if (stage >= stages.size())
    throw InputError(fmt::format("sequence {} has no stage {}", id, stage));
  const bool terminal = stage + 1 == stages.size();
  return certificates(stages[stage], CertificateOptions{false, piece_bound},
                      terminal ? terminal_guide : std::nullopt);
}

bool DecompositionSequence::certifies() const
{
  return !stages.empty() && !stage_certificates(stages.size() - 1).empty();
}

void EquivalenceLedger::register_sequence(const DecompositionSequence& seq)
{
  sequences_[seq.id] = seq;
  parent_.try_emplace(seq.id, seq.id);
}

const DecompositionSequence& EquivalenceLedger::sequence(int id) const
{
  auto it = sequences_.find(id);
  if (it == sequences_.end())
    throw InputError(fmt::format("sequence {} is not registered", id));
  return it->second;
}

int EquivalenceLedger::find(int id) const
{
  auto it = parent_.find(id);
  if (it == parent_.end())
    throw InputError(fmt::format("sequence {} is not registered", id));
  if (it->second == id)
    return id;
  const int root = find(it->second);
  parent_[id] = root;
  return root;
}

bool EquivalenceLedger::relate(int a, int b)
{
  const int ra = find(a), rb = find(b);
  if (ra == rb)
    return false;
  parent_[std::max(ra, rb)] = std::min(ra, rb);
  return true;
}

void EquivalenceLedger::add_witness(const InteractionWitness& w)
{
  if (!registered(w.seq_a) || !registered(w.seq_b))
    throw InputError("witness refers to an unregistered sequence");
  witnesses_.push_back(w);
  relate(w.seq_a, w.seq_b);
}

EquivalenceLedger relate_sequences(const DecompositionSequence& a, const DecompositionSequence& b,
                                   EquivalenceLedger ledger)
{
  if (!ledger.registered(a.id))
    ledger.register_sequence(a);
  if (!ledger.registered(b.id))
    ledger.register_sequence(b);
  for (std::size_t i = 0; i < a.stages.size(); ++i) {
    const auto ca = a.stage_certificates(i);
    for (std::size_t j = 0; j < b.stages.size(); ++j)
      for (const auto& cb : b.stage_certificates(j))
        for (const auto& x : ca)
          if (x.key == cb.key) {
            ledger.add_witness(InteractionWitness{a.id, i, b.id, j, x.key, x, cb});
            return ledger;
          }
  }
  return ledger;
}

EquivalenceAnswer are_equivalent(const EquivalenceLedger& ledger, int a, int b)
{
  if (!ledger.registered(a) || !ledger.registered(b))
    throw InputError("are_equivalent on an unregistered sequence");
  EquivalenceAnswer ans;
  if (a == b) {
    ans.equivalent = true;
    return ans;
  }
  const auto& ws = ledger.witnesses();
  std::map<int, std::size_t> via;
  std::deque<int> queue{a};
  std::set<int> seen{a};
  while (!queue.empty()) {
    const int at = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      int next = -1;
      if (ws[i].seq_a == at)
        next = ws[i].seq_b;
      else if (ws[i].seq_b == at)
        next = ws[i].seq_a;
      if (next < 0 || !seen.insert(next).second)
        continue;
      via[next] = i;
      queue.push_back(next);
    }
  }
  if (!seen.contains(b))
    return ans;
  ans.equivalent = true;
  for (int at = b; at != a;) {
    const auto& w = ws[via.at(at)];
    ans.chain.push_back(w);
    at = w.seq_a == at ? w.seq_b : w.seq_a;
  }
  std::reverse(ans.chain.begin(), ans.chain.end());
  return ans;
}

bool replay_chain(const EquivalenceLedger& ledger, const std::vector<InteractionWitness>& chain, int a, int b)
{
  int at = a;
  for (const auto& w : chain) {
    if (w.seq_a != at && w.seq_b != at)
      return false;
    auto issues = [&](int seq, std::size_t stage) {
      const auto certs = ledger.sequence(seq).stage_certificates(stage);
      return std::any_of(certs.begin(), certs.end(), [&](const Certificate& c) { return c.key == w.shared; });
    };
    if (!issues(w.seq_a, w.stage_a) || !issues(w.seq_b, w.stage_b))
      return false;
    at = w.seq_a == at ? w.seq_b : w.seq_a;
  }
  return at == b;
}

}  // namespace chamber
