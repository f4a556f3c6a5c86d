#include "chamber/surgery.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <boost/pending/disjoint_sets.hpp>

namespace chamber {

namespace {

struct Annulus {
  DiskId disk;
  PieceId end_a;
  PieceId end_b;
  PieceId scar_a;
  PieceId scar_b;
  ChamberId chamber;
};

void forget_topology(Chamber& ch)
{
  ch.annotation = TopAnnotation{};
  ch.punctures.clear();
}

TopAnnotation handlebody_remnant() { return TopAnnotation{Tri::Unknown, Tri::Yes, Tri::Unknown, Tri::No}; }
TopAnnotation ball_annotation() { return TopAnnotation{Tri::Yes, Tri::Yes, Tri::No, Tri::No}; }

void rename_component(std::vector<ComponentId>& ids, ComponentId from, ComponentId to)
{
  std::replace(ids.begin(), ids.end(), from, to);
}

// Capping the sphere `g` of `ch` with a ball.
void cap_sphere(Chamber& ch, ComponentId g)
{
  auto it = std::find_if(ch.punctures.begin(), ch.punctures.end(), [&](const auto& grp) {
    return std::find(grp.begin(), grp.end(), g) != grp.end();
  });
  if (it == ch.punctures.end()) {
    forget_topology(ch);
    return;
  }
  ch.punctures.erase(it);
  for (auto& grp : ch.punctures)
    std::erase(grp, g);
  if (std::any_of(ch.punctures.begin(), ch.punctures.end(), [](const auto& grp) { return grp.empty(); }))
    forget_topology(ch);
}

template <class T>
int next_id(const std::vector<T>& items)
{
  int m = -1;
  for (const auto& x : items)
    m = std::max(m, x.id.value);
  return m + 1;
}

struct Surgeon {
  ChamberComplex w;
  std::map<ChamberId, ChamberId> remnant;
  std::vector<Annulus> annuli;
  std::set<CurveId> surgered;
  int next_piece = 0;
  int next_curve = 0;
  int next_comp = 0;
  int next_chamber = 0;

  explicit Surgeon(const ChamberComplex& c) : w(c)
  {
    for (const auto& ch : c.chambers)
      remnant[ch.id] = ch.id;
    for (const auto& comp : c.components) {
      next_piece = std::max(next_piece, next_id(comp.cut.pieces));
      next_curve = std::max(next_curve, next_id(comp.cut.curves));
    }
    next_comp = next_id(c.components);
    next_chamber = next_id(c.chambers);
  }

  void apply(const DiskAttachment& d);
};

void Surgeon::apply(const DiskAttachment& d)
{
  if (surgered.contains(d.curve))
    throw InputError(fmt::format("disk {} references curve {} which was already surgered", d.id.value, d.curve.value));
  auto xid_opt = w.component_of_curve(d.curve);
  if (!xid_opt)
    throw InputError(fmt::format("disk {} references unknown curve {}", d.id.value, d.curve.value));
  const ComponentId xid = *xid_opt;
  const Incidence inc = w.incidence_of(xid);
  const bool a_match = remnant.at(inc.side_a) == d.chamber;
  const bool b_match = remnant.at(inc.side_b) == d.chamber;
  if (a_match == b_match)
    throw InputError(fmt::format("disk {} does not lie next to its curve", d.id.value));
  const ChamberId A = a_match ? inc.side_a : inc.side_b;
  const ChamberId B = a_match ? inc.side_b : inc.side_a;

  SurfaceComponent X = w.component(xid);
  const Curve c = *X.cut.find_curve(d.curve);
  const CurveClass cls = classify_curve(X, d.curve);
  const auto sidea = side_a_pieces(X.cut, d.curve);
  surgered.insert(d.curve);

  const PieceId sa{next_piece++}, sb{next_piece++};
  const Curve ca{CurveId{next_curve++}, c.a, Slot{sa, 0}};
  const Curve cb{CurveId{next_curve++}, c.b, Slot{sb, 0}};
  std::erase_if(X.cut.curves, [&](const Curve& k) { return k.id == d.curve; });
  annuli.push_back(Annulus{d.id, c.a.piece, c.b.piece, sa, sb, B});

  const TopAnnotation effA = effective_annotation(w, A);
  const bool hbA = effA.is_handlebody == Tri::Yes;

  if (!sidea) {
    X.cut.pieces.push_back(Piece{sa, 0, 1});
    X.cut.pieces.push_back(Piece{sb, 0, 1});
    X.cut.curves.push_back(ca);
    X.cut.curves.push_back(cb);
    X.genus = component_genus(X.cut);
    w.component(xid) = X;
    Chamber& a = w.chamber(A);
    if (hbA) {
      a.annotation = handlebody_remnant();
      a.punctures.clear();
    } else if (!a.punctures.empty() && a.annotation.is_handlebody == Tri::Yes) {
      a.annotation = handlebody_remnant();
    } else {
      forget_topology(a);
    }
    forget_topology(w.chamber(B));
    return;
  }

  // Separating: split X into the slot-a and slot-b halves.
  const ComponentId xa{next_comp++}, xb{next_comp++};
  SurfaceComponent Xa{xa, 0, {}}, Xb{xb, 0, {}};
  for (const auto& p : X.cut.pieces)
    (sidea->contains(p.id) ? Xa : Xb).cut.pieces.push_back(p);
  for (const auto& k : X.cut.curves)
    (sidea->contains(k.a.piece) ? Xa : Xb).cut.curves.push_back(k);
  Xa.cut.pieces.push_back(Piece{sa, 0, 1});
  Xa.cut.curves.push_back(ca);
  Xb.cut.pieces.push_back(Piece{sb, 0, 1});
  Xb.cut.curves.push_back(cb);
  Xa.genus = component_genus(Xa.cut);
  Xb.genus = component_genus(Xb.cut);

  auto comp_of = [&](PieceId p) -> ComponentId {
    if (sidea->contains(p) || p == sa)
      return xa;
    if (X.cut.find_piece(p) || p == sb)
      return xb;
    return *w.component_of_piece(p);
  };

  // Boundary components of A tied together by 2-handles inside A move as one unit.
  const Chamber oldA = w.chamber(A);
  std::vector<ComponentId> members;
  for (auto y : oldA.boundary)
    if (y != xid)
      members.push_back(y);
  members.push_back(xa);
  members.push_back(xb);
  std::map<ComponentId, int> index;
  for (int i = 0; i < static_cast<int>(members.size()); ++i)
    index[members[i]] = i;
  boost::disjoint_sets_with_storage<> units(members.size());
  for (std::size_t i = 0; i < members.size(); ++i)
    units.make_set(i);
  for (const auto& an : annuli)
    if (an.chamber == A)
      units.union_set(index.at(comp_of(an.end_a)), index.at(comp_of(an.end_b)));
  const auto ua = units.find_set(index.at(xa));
  const auto ub = units.find_set(index.at(xb));
  if (ua == ub)
    throw InputError(fmt::format("disk {} would cut through a 2-handle of an earlier disk", d.id.value));
  std::set<int> carried_units{static_cast<int>(ua)};
  for (auto y : members) {
    const auto& comp = w.find_component(y) ? w.component(y) : (y == xa ? Xa : Xb);
    for (auto p : d.carries)
      if (comp.cut.find_piece(p)) {
        auto u = units.find_set(index.at(y));
        if (u != ub)
          carried_units.insert(static_cast<int>(u));
      }
  }
  std::vector<ComponentId> side_a_others, side_b_others;
  for (auto y : members) {
    if (y == xa || y == xb)
      continue;
    (carried_units.contains(static_cast<int>(units.find_set(index.at(y)))) ? side_a_others : side_b_others).push_back(y);
  }

  const ChamberId Aa{next_chamber++}, Ab{next_chamber++};
  Chamber cha{Aa, {}, {}, {}}, chb{Ab, {}, {}, {}};
  cha.boundary = side_a_others;
  cha.boundary.push_back(xa);
  chb.boundary = side_b_others;
  chb.boundary.push_back(xb);

  // A punctured chamber known to be a handlebody once capped: a separating
  // disk leaves a handlebody on each side (a ball on the disk side of a trivial
  // curve), and each side keeps the puncture spheres it holds.
  const bool capped_handlebody = !oldA.punctures.empty() && oldA.annotation.is_handlebody == Tri::Yes;
  auto split_punctured = [&] {
    auto on_a = [&](ComponentId y) {
      return y == xa || std::find(side_a_others.begin(), side_a_others.end(), y) != side_a_others.end();
    };
    std::vector<std::vector<ComponentId>> pa, pb;
    for (const auto& grp : oldA.punctures) {
      if (std::find(grp.begin(), grp.end(), xid) != grp.end())
        return;
      const auto n_a = std::count_if(grp.begin(), grp.end(), on_a);
      if (n_a != 0 && n_a != static_cast<long>(grp.size()))
        return;
      (n_a ? pa : pb).push_back(grp);
    }
    if (cls.kind == CurveKind::Inessential) {
      const TopAnnotation far = cls.disk_side == DiskSide::Both ? ball_annotation() : oldA.annotation;
      cha.annotation = cls.disk_side == DiskSide::B ? far : ball_annotation();
      chb.annotation = cls.disk_side == DiskSide::A ? far : ball_annotation();
    } else {
      cha.annotation = chb.annotation = handlebody_remnant();
    }
    cha.punctures = std::move(pa);
    chb.punctures = std::move(pb);
  };
  if (cls.kind == CurveKind::Inessential) {
    const bool a_disk = cls.disk_side != DiskSide::B;
    const bool b_disk = cls.disk_side != DiskSide::A;
    std::optional<char> pocket;
    if (a_disk && side_a_others.empty())
      pocket = 'a';
    else if (b_disk && side_b_others.empty())
      pocket = 'b';
    if (pocket) {
      Chamber& pk = *pocket == 'a' ? cha : chb;
      Chamber& rest = *pocket == 'a' ? chb : cha;
      if (w.mode == AmbientMode::Sphere || effA.is_reducible == Tri::No)
        pk.annotation = ball_annotation();
      rest.annotation = oldA.annotation;
      rest.punctures = oldA.punctures;
      for (auto& grp : rest.punctures)
        rename_component(grp, xid, *pocket == 'a' ? xb : xa);
    } else if (hbA) {
      cha.annotation = chb.annotation = handlebody_remnant();
    } else if (capped_handlebody) {
      split_punctured();
    }
  } else if (hbA) {
    cha.annotation = chb.annotation = handlebody_remnant();
  } else if (capped_handlebody) {
    split_punctured();
  }

  Chamber& bch = w.chamber(B);
  if (cls.kind == CurveKind::Inessential) {
    for (auto& grp : bch.punctures)
      if (std::find(grp.begin(), grp.end(), xid) != grp.end()) {
        std::erase(grp, xid);
        grp.push_back(xa);
        grp.push_back(xb);
      }
    std::vector<ComponentId> fresh;
    if (cls.disk_side != DiskSide::B)
      fresh.push_back(xa);
    if (cls.disk_side != DiskSide::A)
      fresh.push_back(xb);
    bch.punctures.push_back(fresh);
  } else {
    forget_topology(bch);
  }
  std::erase(bch.boundary, xid);
  bch.boundary.push_back(xa);
  bch.boundary.push_back(xb);

  std::erase_if(w.components, [&](const SurfaceComponent& k) { return k.id == xid; });
  w.components.push_back(Xa);
  w.components.push_back(Xb);
  std::erase_if(w.incidence, [&](const Incidence& k) { return k.component == xid; });
  w.incidence.push_back(Incidence{xa, Aa, B});
  w.incidence.push_back(Incidence{xb, Ab, B});
  for (auto& k : w.incidence) {
    auto retarget = [&](ChamberId& side) {
      if (side != A)
        return;
      side = std::find(side_a_others.begin(), side_a_others.end(), k.component) != side_a_others.end() ? Aa : Ab;
    };
    retarget(k.side_a);
    retarget(k.side_b);
  }
  std::erase_if(w.chambers, [&](const Chamber& k) { return k.id == A; });
  w.chambers.push_back(cha);
  w.chambers.push_back(chb);
  remnant[Aa] = remnant[Ab] = remnant.at(A);
  remnant.erase(A);

  for (auto& an : annuli)
    if (an.chamber == A && an.disk != d.id) {
      auto side = comp_of(an.end_a);
      an.chamber = (side == xa || std::find(side_a_others.begin(), side_a_others.end(), side) != side_a_others.end())
                       ? Aa
                       : Ab;
    }
}

PanelGraph build_panels(const ChamberComplex& before, const ChamberComplex& raw, const std::vector<Annulus>& annuli,
                        const std::set<CurveId>& surgered)
{
  PanelGraph g;
  for (const auto& comp : before.components) {
    for (const auto& p : comp.cut.pieces)
      g.nodes.push_back(PanelNode{p.id, p.genus, comp.id, *raw.component_of_piece(p.id)});
    for (const auto& k : comp.cut.curves)
      if (!surgered.contains(k.id))
        g.edges.push_back(PanelEdge{k.a.piece, k.b.piece, std::nullopt, ChamberId{}});
  }
  for (const auto& an : annuli)
    g.edges.push_back(PanelEdge{an.end_a, an.end_b, an.disk, an.chamber});
  std::sort(g.nodes.begin(), g.nodes.end(), [](const PanelNode& x, const PanelNode& y) { return x.piece < y.piece; });
  return g;
}

}  // namespace

const PanelNode& PanelGraph::node(PieceId id) const
{
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const PanelNode& n, PieceId p) { return n.piece < p; });
  if (it == nodes.end() || it->piece != id)
    throw InputError(fmt::format("piece {} is not a panel", id.value));
  return *it;
}

std::vector<ChamberId> RawComplex::raw_remnants(ChamberId old_chamber) const
{
  std::vector<ChamberId> out;
  for (const auto& [r, o] : remnant)
    if (o == old_chamber)
      out.push_back(r);
  return out;
}

RawComplex trivial_raw(const ChamberComplex& complex)
{
  return surger(complex, {});
}

RawComplex surger(const ChamberComplex& complex, const DiskSet& disks)
{
  if (auto r = validate_complex(complex); !r.ok())
    throw InputError("cannot surger an invalid complex: " + r.issues.front().code);
  if (auto r = validate_disk_set(complex, disks); !r.ok())
    throw InputError("invalid disk set: " + r.issues.front().code + " (" + r.issues.front().detail + ")");
  DiskSet ordered = disks;
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.id < y.id; });

  Surgeon s(complex);
  for (const auto& d : ordered)
    s.apply(d);
  s.w.sort_canonical();
  if (auto r = validate_complex(s.w); !r.ok())
    throw ContractViolation("surgery produced an invalid complex: " + r.issues.front().code + " (" +
                            r.issues.front().detail + ")");

  RawComplex out;
  out.before = complex;
  out.raw = s.w;
  out.complex = s.w;
  out.remnant = s.remnant;
  out.disk_count = static_cast<int>(ordered.size());
  for (const auto& ch : s.w.chambers)
    out.region[ch.id] = {ch.id};
  for (const auto& an : s.annuli) {
    ScarRecord rec{an.disk, an.scar_a, an.scar_b, *s.w.component_of_piece(an.scar_a),
                   *s.w.component_of_piece(an.scar_b), an.chamber};
    const auto& hc = s.w.chamber(an.chamber).boundary;
    if (std::find(hc.begin(), hc.end(), rec.host_a) == hc.end() ||
        std::find(hc.begin(), hc.end(), rec.host_b) == hc.end())
      throw ContractViolation(fmt::format("2-handle of disk {} is detached from its scars", an.disk.value));
    out.scars.push_back(rec);
  }
  out.panels = build_panels(complex, s.w, s.annuli, s.surgered);
  return out;
}

ScarSide classify_scar(const RawComplex& raw, ChamberId chamber, const ScarRecord& scar)
{
  const auto& ch = raw.raw.chamber(chamber);
  auto on = [&](ComponentId c) { return std::find(ch.boundary.begin(), ch.boundary.end(), c) != ch.boundary.end(); };
  if (!on(scar.host_a) && !on(scar.host_b))
    throw InputError(fmt::format("scars of disk {} are not on chamber {}", scar.disk.value, chamber.value));
  return chamber == scar.handle_chamber ? ScarSide::Internal : ScarSide::External;
}

bool region_is_disky(const RawComplex& raw, const std::set<ChamberId>& region)
{
  std::set<ComponentId> interior;
  for (const auto& inc : raw.raw.incidence)
    if (region.contains(inc.side_a) && region.contains(inc.side_b))
      interior.insert(inc.component);

  const auto& nodes = raw.panels.nodes;
  std::map<PieceId, int> index;
  for (const auto& n : nodes)
    if (interior.contains(n.host))
      index.emplace(n.piece, static_cast<int>(index.size()));
  const int n = static_cast<int>(index.size());
  boost::disjoint_sets_with_storage<> ds(std::max(n, 1));
  for (int i = 0; i < n; ++i)
    ds.make_set(i);

  std::vector<std::pair<int, int>> edges;
  std::vector<int> loose_ends;
  for (const auto& e : raw.panels.edges) {
    if (e.disk && !region.contains(e.annulus_chamber))
      continue;
    auto ia = index.find(e.a), ib = index.find(e.b);
    const bool ha = ia != index.end(), hb = ib != index.end();
    if (!e.disk && !(ha && hb))
      continue;
    if (!ha && !hb)
      return false;  // a free annulus
    if (ha && hb) {
      edges.emplace_back(ia->second, ib->second);
      ds.union_set(ia->second, ib->second);
    } else {
      loose_ends.push_back(ha ? ia->second : ib->second);
    }
  }
  std::map<int, int> genus, vertices, edge_count, boundary;
  for (const auto& node : nodes)
    if (auto it = index.find(node.piece); it != index.end()) {
      auto r = static_cast<int>(ds.find_set(it->second));
      genus[r] += node.genus;
      vertices[r] += 1;
    }
  for (auto [a, b] : edges)
    edge_count[static_cast<int>(ds.find_set(a))] += 1;
  for (auto v : loose_ends)
    boundary[static_cast<int>(ds.find_set(v))] += 1;
  for (const auto& [r, v] : vertices) {
    const int g = genus[r] + edge_count[r] - v + 1;
    if (g != 0 || boundary[r] != 1)
      return false;
  }
  return true;
}

bool is_disky(const RawComplex& raw, ComponentId component, ChamberId side_chamber)
{
  std::set<ChamberId> region;
  for (auto c : side_of(raw.complex, component, side_chamber))
    region.insert(raw.region.at(c).begin(), raw.region.at(c).end());
  return region_is_disky(raw, region);
}

bool chamber_is_disky(const RawComplex& raw, ChamberId current)
{
  return region_is_disky(raw, raw.region.at(current));
}

GoneballCandidates goneball_candidates(const RawComplex& raw)
{
  GoneballCandidates out;
  for (const auto& ch : raw.complex.chambers) {
    if (ch.boundary.size() != 1 || raw.complex.component(ch.boundary.front()).genus != 0)
      continue;
    const auto a = effective_annotation(raw.complex, ch);
    if (a.is_ball == Tri::No || !chamber_is_disky(raw, ch.id))
      continue;
    (a.is_ball == Tri::Yes ? out.chambers : out.needs_annotation).push_back(ch.id);
  }
  return out;
}

RawComplex prune(const RawComplex& raw, const std::vector<ChamberId>& chosen)
{
  RawComplex out = raw;
  std::vector<ChamberId> order = chosen;
  std::sort(order.begin(), order.end());
  for (auto z : order) {
    const auto cands = goneball_candidates(out).chambers;
    if (std::find(cands.begin(), cands.end(), z) == cands.end())
      throw InputError(fmt::format("chamber {} is not a goneball candidate", z.value));
    auto& cx = out.complex;
    const ComponentId g = cx.chamber(z).boundary.front();
    const ChamberId nb = cx.across(g, z);
    Chamber& n = cx.chamber(nb);
    std::erase(n.boundary, g);
    cap_sphere(n, g);
    std::erase_if(cx.components, [&](const SurfaceComponent& k) { return k.id == g; });
    std::erase_if(cx.incidence, [&](const Incidence& k) { return k.component == g; });
    std::erase_if(cx.chambers, [&](const Chamber& k) { return k.id == z; });
    out.region[nb].insert(out.region[z].begin(), out.region[z].end());
    out.region.erase(z);
    out.gone.insert(z);
  }
  return out;
}

}  // namespace chamber
