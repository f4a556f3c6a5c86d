#include "chamber/scene.hpp"

#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <boost/pending/disjoint_sets.hpp>

namespace chamber {

namespace {

template <class T, class IdT>
const T* find_by_id(const std::vector<T>& items, IdT id)
{
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

struct PieceIndex {
  std::map<PieceId, int> index;
  explicit PieceIndex(const CutComplex& cut)
  {
    for (int i = 0; i < static_cast<int>(cut.pieces.size()); ++i)
      index.emplace(cut.pieces[i].id, i);
  }
  int operator()(PieceId id) const
  {
    auto it = index.find(id);
    if (it == index.end())
      throw InputError(fmt::format("unknown piece {}", id.value));
    return it->second;
  }
};

// Number of connected classes of pieces, optionally ignoring one curve.
int count_classes(const CutComplex& cut, std::optional<CurveId> skip, std::vector<int>* labels = nullptr)
{
  const int n = static_cast<int>(cut.pieces.size());
  if (n == 0)
    return 0;
  PieceIndex idx(cut);
  boost::disjoint_sets_with_storage<> ds(n);
  for (int i = 0; i < n; ++i)
    ds.make_set(i);
  for (const auto& c : cut.curves) {
    if (skip && c.id == *skip)
      continue;
    ds.union_set(idx(c.a.piece), idx(c.b.piece));
  }
  std::set<int> roots;
  for (int i = 0; i < n; ++i)
    roots.insert(static_cast<int>(ds.find_set(i)));
  if (labels) {
    labels->assign(n, 0);
    for (int i = 0; i < n; ++i)
      (*labels)[i] = static_cast<int>(ds.find_set(i));
  }
  return static_cast<int>(roots.size());
}

std::string cid(ComponentId c) { return fmt::format("component {}", c.value); }
std::string hid(ChamberId c) { return fmt::format("chamber {}", c.value); }

}  // namespace

const Piece* CutComplex::find_piece(PieceId id) const { return find_by_id(pieces, id); }
const Curve* CutComplex::find_curve(CurveId id) const { return find_by_id(curves, id); }

const SurfaceComponent* ChamberComplex::find_component(ComponentId id) const { return find_by_id(components, id); }
const Chamber* ChamberComplex::find_chamber(ChamberId id) const { return find_by_id(chambers, id); }

const Incidence* ChamberComplex::find_incidence(ComponentId id) const
{
  auto it = std::find_if(incidence.begin(), incidence.end(), [&](const Incidence& x) { return x.component == id; });
  return it == incidence.end() ? nullptr : &*it;
}

SurfaceComponent& ChamberComplex::component(ComponentId id)
{
  return const_cast<SurfaceComponent&>(std::as_const(*this).component(id));
}

const SurfaceComponent& ChamberComplex::component(ComponentId id) const
{
  if (auto* c = find_component(id))
    return *c;
  throw InputError("unknown " + cid(id));
}

Chamber& ChamberComplex::chamber(ChamberId id) { return const_cast<Chamber&>(std::as_const(*this).chamber(id)); }

const Chamber& ChamberComplex::chamber(ChamberId id) const
{
  if (auto* c = find_chamber(id))
    return *c;
  throw InputError("unknown " + hid(id));
}

Incidence& ChamberComplex::incidence_of(ComponentId id)
{
  return const_cast<Incidence&>(std::as_const(*this).incidence_of(id));
}

const Incidence& ChamberComplex::incidence_of(ComponentId id) const
{
  if (auto* i = find_incidence(id))
    return *i;
  throw InputError("no incidence for " + cid(id));
}

ChamberId ChamberComplex::across(ComponentId comp, ChamberId from) const
{
  const auto& inc = incidence_of(comp);
  if (inc.side_a == from)
    return inc.side_b;
  if (inc.side_b == from)
    return inc.side_a;
  throw InputError(fmt::format("{} does not border {}", cid(comp), hid(from)));
}

std::optional<ComponentId> ChamberComplex::component_of_curve(CurveId curve) const
{
  for (const auto& c : components)
    if (c.cut.find_curve(curve))
      return c.id;
  return std::nullopt;
}

std::optional<ComponentId> ChamberComplex::component_of_piece(PieceId piece) const
{
  for (const auto& c : components)
    if (c.cut.find_piece(piece))
      return c.id;
  return std::nullopt;
}

int ChamberComplex::total_euler_characteristic() const
{
  int chi = 0;
  for (const auto& c : components)
    chi += euler_characteristic(c.cut);
  return chi;
}

void ChamberComplex::sort_canonical()
{
  auto by_id = [](const auto& x, const auto& y) { return x.id < y.id; };
  std::sort(components.begin(), components.end(), by_id);
  for (auto& c : components) {
    std::sort(c.cut.pieces.begin(), c.cut.pieces.end(), by_id);
    std::sort(c.cut.curves.begin(), c.cut.curves.end(), by_id);
  }
  std::sort(chambers.begin(), chambers.end(), by_id);
  for (auto& ch : chambers) {
    std::sort(ch.boundary.begin(), ch.boundary.end());
    for (auto& g : ch.punctures)
      std::sort(g.begin(), g.end());
    std::sort(ch.punctures.begin(), ch.punctures.end());
  }
  std::sort(incidence.begin(), incidence.end(),
            [](const Incidence& x, const Incidence& y) { return x.component < y.component; });
}

int euler_characteristic(const CutComplex& cut)
{
  int chi = 0;
  for (const auto& p : cut.pieces)
    chi += 2 - 2 * p.genus - p.slots;
  return chi;
}

bool is_connected(const CutComplex& cut) { return count_classes(cut, std::nullopt) == 1; }

int component_genus(const CutComplex& cut)
{
  if (!is_connected(cut))
    throw InputError("cut complex incidence graph is disconnected");
  int g = 0;
  for (const auto& p : cut.pieces)
    g += p.genus;
  const int cycle_rank = static_cast<int>(cut.curves.size()) - static_cast<int>(cut.pieces.size()) + 1;
  return g + cycle_rank;
}

std::optional<std::set<PieceId>> side_a_pieces(const CutComplex& cut, CurveId curve)
{
  const Curve* c = cut.find_curve(curve);
  if (!c)
    throw InputError(fmt::format("unknown curve {}", curve.value));
  std::vector<int> labels;
  count_classes(cut, curve, &labels);
  PieceIndex idx(cut);
  const int la = labels[idx(c->a.piece)];
  if (la == labels[idx(c->b.piece)])
    return std::nullopt;
  std::set<PieceId> side;
  for (std::size_t i = 0; i < cut.pieces.size(); ++i)
    if (labels[i] == la)
      side.insert(cut.pieces[i].id);
  return side;
}

namespace {

int side_genus(const CutComplex& cut, const std::set<PieceId>& side, CurveId skip)
{
  int g = 0;
  for (const auto& p : cut.pieces)
    if (side.contains(p.id))
      g += p.genus;
  int edges = 0;
  for (const auto& c : cut.curves)
    if (c.id != skip && side.contains(c.a.piece) && side.contains(c.b.piece))
      ++edges;
  return g + edges - static_cast<int>(side.size()) + 1;
}

}  // namespace

CurveClass classify_curve(const SurfaceComponent& component, CurveId curve)
{
  const auto& cut = component.cut;
  auto side = side_a_pieces(cut, curve);
  if (!side)
    return CurveClass{CurveKind::EssentialNonseparating, DiskSide::A, 0, 0};
  std::set<PieceId> other;
  for (const auto& p : cut.pieces)
    if (!side->contains(p.id))
      other.insert(p.id);
  CurveClass out;
  out.genus_a = side_genus(cut, *side, curve);
  out.genus_b = side_genus(cut, other, curve);
  if (out.genus_a == 0 || out.genus_b == 0) {
    out.kind = CurveKind::Inessential;
    out.disk_side = out.genus_a == 0 ? (out.genus_b == 0 ? DiskSide::Both : DiskSide::A) : DiskSide::B;
  } else {
    out.kind = CurveKind::EssentialSeparating;
  }
  return out;
}

TopAnnotation effective_annotation(const ChamberComplex& complex, ChamberId chamber)
{
  return effective_annotation(complex, complex.chamber(chamber));
}

TopAnnotation effective_annotation(const ChamberComplex& complex, const Chamber& ch)
{
  TopAnnotation a = ch.annotation;
  const auto n = ch.boundary.size();
  const bool punctured = !ch.punctures.empty();
  if (punctured || n != 1) {
    a.is_ball = Tri::No;
    a.is_handlebody = Tri::No;
    a.is_solid_torus = Tri::No;
  } else {
    const int g = complex.component(ch.boundary.front()).genus;
    if (g != 0)
      a.is_ball = Tri::No;
    if (g != 1)
      a.is_solid_torus = Tri::No;
    if (complex.mode == AmbientMode::Sphere && g == 0) {
      a.is_ball = Tri::Yes;
      a.is_handlebody = Tri::Yes;
    }
    // A handlebody has the genus of its boundary.
    if (g == 0 && a.is_handlebody == Tri::Yes)
      a.is_ball = Tri::Yes;
    if (g == 0 && a.is_ball == Tri::No)
      a.is_handlebody = Tri::No;
  }
  if (complex.mode == AmbientMode::Sphere && n == 0)
    a.is_reducible = Tri::No;
  if (a.is_ball == Tri::Yes || a.is_solid_torus == Tri::Yes)
    a.is_handlebody = Tri::Yes;
  if (a.is_handlebody == Tri::Yes && !punctured)
    a.is_reducible = Tri::No;
  return a;
}

bool ValidationReport::has(const std::string& code) const
{
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

namespace {

void check_annotation(const ChamberComplex& complex, const Chamber& ch, ValidationReport& report)
{
  const auto& d = ch.annotation;
  auto bad = [&](const char* what) {
    report.issues.push_back({"annotation-inconsistent", fmt::format("{}: {}", hid(ch.id), what)});
  };
  if (d.is_ball == Tri::Yes && d.is_handlebody == Tri::No)
    bad("ball but not a handlebody");
  if (d.is_solid_torus == Tri::Yes && d.is_handlebody == Tri::No)
    bad("solid torus but not a handlebody");
  if (d.is_ball == Tri::Yes && d.is_solid_torus == Tri::Yes)
    bad("ball and solid torus");
  if (d.is_handlebody == Tri::Yes && d.is_reducible == Tri::Yes && ch.punctures.empty())
    bad("reducible handlebody");
  bool shape_known = true;
  for (auto b : ch.boundary)
    if (!complex.find_component(b))
      shape_known = false;
  if (!shape_known)
    return;
  // A punctured chamber is described by its annotation once capped.
  Chamber capped = ch;
  capped.punctures.clear();
  for (const auto& group : ch.punctures)
    for (auto g : group)
      if (auto it = std::find(capped.boundary.begin(), capped.boundary.end(), g); it != capped.boundary.end()) {
        capped.boundary.erase(it);
        break;
      }
  const auto forced = effective_annotation(complex, capped);
  auto clash = [](Tri declared, Tri f) { return declared != Tri::Unknown && f != Tri::Unknown && declared != f; };
  if (clash(d.is_ball, forced.is_ball))
    bad("is_ball contradicts the boundary");
  if (clash(d.is_handlebody, forced.is_handlebody))
    bad(ch.boundary.size() == 1 ? "is_handlebody contradicts the boundary"
                                : "handlebody must have exactly one boundary component");
  if (clash(d.is_solid_torus, forced.is_solid_torus))
    bad("is_solid_torus contradicts the boundary");
  if (clash(d.is_reducible, forced.is_reducible))
    bad("is_reducible contradicts the boundary");
}

void check_cut(const SurfaceComponent& comp, std::set<PieceId>& pieces_seen, std::set<CurveId>& curves_seen,
               ValidationReport& report)
{
  const auto& cut = comp.cut;
  auto issue = [&](const char* code, std::string detail) {
    report.issues.push_back({code, cid(comp.id) + ": " + std::move(detail)});
  };
  if (comp.genus < 0)
    issue("negative-genus", "declared genus is negative");
  if (cut.pieces.empty()) {
    issue("empty-cut-complex", "no pieces");
    return;
  }
  std::map<PieceId, const Piece*> local;
  for (const auto& p : cut.pieces) {
    if (!pieces_seen.insert(p.id).second)
      issue("duplicate-id", fmt::format("piece {} repeated", p.id.value));
    if (p.genus < 0 || p.slots < 0)
      issue("negative-genus", fmt::format("piece {} has negative genus or slot count", p.id.value));
    local[p.id] = &p;
  }
  std::map<Slot, int> uses;
  bool refs_ok = true;
  for (const auto& c : cut.curves) {
    if (!curves_seen.insert(c.id).second)
      issue("duplicate-id", fmt::format("curve {} repeated", c.id.value));
    for (const Slot& s : {c.a, c.b}) {
      auto it = local.find(s.piece);
      if (it == local.end()) {
        issue("dangling-reference", fmt::format("curve {} names piece {}", c.id.value, s.piece.value));
        refs_ok = false;
        continue;
      }
      if (s.index < 0 || s.index >= it->second->slots) {
        issue("slot-out-of-range", fmt::format("curve {} uses slot {} of piece {}", c.id.value, s.index,
                                               s.piece.value));
        refs_ok = false;
        continue;
      }
      ++uses[s];
    }
    if (c.a == c.b)
      issue("slot-reused", fmt::format("curve {} glues a slot to itself", c.id.value));
  }
  for (const auto& p : cut.pieces)
    for (int i = 0; i < p.slots; ++i) {
      const int n = uses[Slot{p.id, i}];
      if (n == 0)
        issue("slot-unmatched", fmt::format("slot {} of piece {} is unmatched", i, p.id.value));
      else if (n > 1)
        issue("slot-reused", fmt::format("slot {} of piece {} is used {} times", i, p.id.value, n));
    }
  if (!refs_ok)
    return;
  if (!is_connected(cut)) {
    issue("incidence-disconnected", "pieces and curves do not form a connected surface");
    return;
  }
  const int g = component_genus(cut);
  if (g != comp.genus)
    issue("genus-mismatch", fmt::format("declared genus {} but the cut complex has genus {}", comp.genus, g));
  if (comp.genus == 0)
    for (const auto& c : cut.curves)
      if (classify_curve(comp, c.id).kind != CurveKind::Inessential)
        issue("essential-curve-on-sphere", fmt::format("curve {}", c.id.value));
}

}  // namespace

ValidationReport validate_complex(const ChamberComplex& complex)
{
  ValidationReport report;
  auto issue = [&](const char* code, std::string detail) { report.issues.push_back({code, std::move(detail)}); };

  std::set<ComponentId> comp_ids;
  std::set<PieceId> pieces_seen;
  std::set<CurveId> curves_seen;
  for (const auto& c : complex.components) {
    if (!comp_ids.insert(c.id).second)
      issue("duplicate-id", cid(c.id) + " repeated");
    check_cut(c, pieces_seen, curves_seen, report);
  }
  std::set<ChamberId> chamber_ids;
  for (const auto& ch : complex.chambers)
    if (!chamber_ids.insert(ch.id).second)
      issue("duplicate-id", hid(ch.id) + " repeated");

  std::map<ChamberId, std::set<ComponentId>> from_incidence;
  std::set<ComponentId> with_incidence;
  bool incidence_ok = true;
  for (const auto& inc : complex.incidence) {
    if (!comp_ids.contains(inc.component)) {
      issue("dangling-reference", "incidence names unknown " + cid(inc.component));
      incidence_ok = false;
      continue;
    }
    if (!with_incidence.insert(inc.component).second) {
      issue("duplicate-id", "incidence repeated for " + cid(inc.component));
      incidence_ok = false;
    }
    for (auto side : {inc.side_a, inc.side_b})
      if (!chamber_ids.contains(side)) {
        issue("dangling-reference", fmt::format("incidence of {} names unknown {}", cid(inc.component), hid(side)));
        incidence_ok = false;
      }
    if (inc.side_a == inc.side_b) {
      issue("tree-violation", cid(inc.component) + " has the same chamber on both sides");
      incidence_ok = false;
    }
    from_incidence[inc.side_a].insert(inc.component);
    from_incidence[inc.side_b].insert(inc.component);
  }
  for (auto c : comp_ids)
    if (!with_incidence.contains(c)) {
      issue("missing-incidence", cid(c) + " separates no chambers");
      incidence_ok = false;
    }

  for (const auto& ch : complex.chambers) {
    std::set<ComponentId> declared(ch.boundary.begin(), ch.boundary.end());
    if (declared.size() != ch.boundary.size())
      issue("duplicate-id", hid(ch.id) + " lists a boundary component twice");
    for (auto b : declared)
      if (!comp_ids.contains(b))
        issue("dangling-reference", fmt::format("{} names unknown {}", hid(ch.id), cid(b)));
    if (declared != from_incidence[ch.id])
      issue("boundary-mismatch", hid(ch.id) + " boundary disagrees with incidence");
    if (declared.empty() && !complex.components.empty())
      issue("empty-boundary", hid(ch.id) + " has no boundary");
    for (const auto& group : ch.punctures)
      for (auto p : group) {
        if (!declared.contains(p))
          issue("puncture-invalid", fmt::format("{} puncture {} is not on its boundary", hid(ch.id), p.value));
        else if (auto* pc = complex.find_component(p); pc && pc->genus != 0)
          issue("puncture-invalid", fmt::format("{} puncture {} is not a sphere", hid(ch.id), p.value));
      }
    check_annotation(complex, ch, report);
  }

  if (complex.chambers.size() != complex.components.size() + 1) {
    issue("tree-violation", fmt::format("{} chambers for {} components", complex.chambers.size(),
                                        complex.components.size()));
  } else if (incidence_ok && !complex.chambers.empty()) {
    std::set<ChamberId> seen{complex.chambers.front().id};
    std::deque<ChamberId> queue{complex.chambers.front().id};
    while (!queue.empty()) {
      auto c = queue.front();
      queue.pop_front();
      for (auto comp : from_incidence[c]) {
        auto n = complex.across(comp, c);
        if (seen.insert(n).second)
          queue.push_back(n);
      }
    }
    if (seen.size() != complex.chambers.size())
      issue("tree-violation", "chamber graph is disconnected");
  }
  return report;
}

std::map<DiskId, std::optional<DiskId>> compute_nesting(const ChamberComplex& complex, const DiskSet& disks)
{
  struct Info {
    const DiskAttachment* disk;
    std::optional<std::set<PieceId>> inside;
    std::set<PieceId> ends;
  };
  std::vector<Info> infos;
  for (const auto& d : disks) {
    const auto* comp = complex.find_component(d.component);
    if (!comp || !comp->cut.find_curve(d.curve))
      continue;
    const auto* c = comp->cut.find_curve(d.curve);
    infos.push_back({&d, side_a_pieces(comp->cut, d.curve), {c->a.piece, c->b.piece}});
  }
  std::map<DiskId, std::optional<DiskId>> out;
  for (const auto& e : infos) {
    const Info* best = nullptr;
    for (const auto& d : infos) {
      if (d.disk == e.disk || d.disk->component != e.disk->component || !d.inside)
        continue;
      bool within = std::all_of(e.ends.begin(), e.ends.end(), [&](PieceId p) { return d.inside->contains(p); });
      // A curve touching the parent's own boundary pieces is enclosed only when it sits strictly inside.
      bool outside_mine = !e.inside || std::none_of(d.ends.begin(), d.ends.end(),
                                                    [&](PieceId p) { return e.inside->contains(p); });
      if (!within || !outside_mine)
        continue;
      if (!best || d.inside->size() < best->inside->size() ||
          (d.inside->size() == best->inside->size() && d.disk->id < best->disk->id))
        best = &d;
    }
    out[e.disk->id] = best ? std::optional<DiskId>(best->disk->id) : std::nullopt;
  }
  return out;
}

ValidationReport validate_disk_set(const ChamberComplex& complex, const DiskSet& disks)
{
  ValidationReport report;
  auto issue = [&](const char* code, std::string detail) { report.issues.push_back({code, std::move(detail)}); };
  std::set<DiskId> ids;
  std::set<CurveId> curves;
  bool refs_ok = true;
  for (const auto& d : disks) {
    const auto tag = fmt::format("disk {}", d.id.value);
    if (!ids.insert(d.id).second)
      issue("duplicate-id", tag + " repeated");
    const auto* comp = complex.find_component(d.component);
    const auto* ch = complex.find_chamber(d.chamber);
    if (!comp || !ch) {
      issue("dangling-reference", tag + " names an unknown chamber or component");
      refs_ok = false;
      continue;
    }
    const auto* inc = complex.find_incidence(d.component);
    if (!inc || (inc->side_a != d.chamber && inc->side_b != d.chamber))
      issue("disk-chamber-not-incident", tag + " lies in a chamber its component does not bound");
    if (!comp->cut.find_curve(d.curve)) {
      issue("dangling-reference", fmt::format("{} names curve {} not on {}", tag, d.curve.value, cid(d.component)));
      refs_ok = false;
      continue;
    }
    if (!curves.insert(d.curve).second)
      issue("disk-curve-reused", fmt::format("curve {} carries two disks", d.curve.value));
    for (auto p : d.carries)
      if (!complex.component_of_piece(p))
        issue("dangling-reference", fmt::format("{} carries unknown piece {}", tag, p.value));
  }
  for (const auto& d : disks)
    if (d.nesting_parent && !ids.contains(*d.nesting_parent)) {
      issue("dangling-reference", fmt::format("disk {} names unknown nesting parent", d.id.value));
      refs_ok = false;
    }
  if (refs_ok) {
    auto nesting = compute_nesting(complex, disks);
    for (const auto& d : disks)
      if (nesting[d.id] != d.nesting_parent)
        issue("nesting-inconsistent", fmt::format("disk {} declares nesting parent {} but its curve sits inside {}",
                                                  d.id.value, d.nesting_parent ? d.nesting_parent->value : -1,
                                                  nesting[d.id] ? nesting[d.id]->value : -1));
  }
  return report;
}

ValidationReport validate_flags(const ChamberComplex& complex, const FlagMap& flags)
{
  ValidationReport report;
  for (const auto& [id, f] : flags)
    if (!complex.find_chamber(id))
      report.issues.push_back({"dangling-reference", "flag for unknown " + hid(id)});
  for (const auto& ch : complex.chambers) {
    auto it = flags.find(ch.id);
    if (it == flags.end()) {
      report.issues.push_back({"flag-missing", hid(ch.id) + " has no flag"});
      continue;
    }
    if (it->second == Flag::Empty) {
      const auto a = effective_annotation(complex, ch);
      if (a.is_handlebody != Tri::Yes || a.is_ball != Tri::No)
        report.issues.push_back({"flag-invalid", hid(ch.id) + " is empty but not known to be a non-ball handlebody"});
    }
  }
  return report;
}

ValidationReport validate_scenario(const ChamberComplex& complex, const std::vector<DiskSet>& disk_sets,
                                   const std::optional<FlagMap>& flags)
{
  auto report = validate_complex(complex);
  if (!report.ok())
    return report;
  for (const auto& ds : disk_sets) {
    auto r = validate_disk_set(complex, ds);
    report.issues.insert(report.issues.end(), r.issues.begin(), r.issues.end());
  }
  if (flags) {
    auto r = validate_flags(complex, *flags);
    report.issues.insert(report.issues.end(), r.issues.begin(), r.issues.end());
  }
  return report;
}

std::vector<ChamberId> ChamberTree::path(ChamberId from, ChamberId to) const
{
  std::vector<ChamberId> up, down;
  auto a = from, b = to;
  while (depth.at(a) > depth.at(b)) {
    up.push_back(a);
    a = *parent.at(a);
  }
  while (depth.at(b) > depth.at(a)) {
    down.push_back(b);
    b = *parent.at(b);
  }
  while (a != b) {
    up.push_back(a);
    down.push_back(b);
    a = *parent.at(a);
    b = *parent.at(b);
  }
  up.push_back(a);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

ChamberTree derive_chamber_tree(const ChamberComplex& complex)
{
  auto report = validate_complex(complex);
  if (!report.ok())
    throw InputError("invalid complex: " + report.issues.front().code + " (" + report.issues.front().detail + ")");
  ChamberTree tree;
  if (complex.chambers.empty())
    throw InputError("complex has no chambers");
  tree.root = std::min_element(complex.chambers.begin(), complex.chambers.end(),
                               [](const Chamber& x, const Chamber& y) { return x.id < y.id; })
                  ->id;
  tree.parent[tree.root] = std::nullopt;
  tree.depth[tree.root] = 0;
  std::vector<ChamberId> stack{tree.root};
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    tree.preorder.push_back(c);
    std::vector<std::pair<ChamberId, ComponentId>> kids;
    for (auto comp : complex.chamber(c).boundary) {
      auto n = complex.across(comp, c);
      if (tree.parent[c] && n == *tree.parent[c])
        continue;
      kids.emplace_back(n, comp);
    }
    std::sort(kids.begin(), kids.end());
    for (auto [n, comp] : kids) {
      tree.parent[n] = c;
      tree.parent_edge[n] = comp;
      tree.depth[n] = tree.depth[c] + 1;
      tree.children[c].push_back(n);
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      stack.push_back(it->first);
  }
  return tree;
}

std::set<ChamberId> side_of(const ChamberComplex& complex, ComponentId cut, ChamberId start)
{
  std::set<ChamberId> seen{start};
  std::vector<ChamberId> stack{start};
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    for (auto comp : complex.chamber(c).boundary) {
      if (comp == cut)
        continue;
      auto n = complex.across(comp, c);
      if (seen.insert(n).second)
        stack.push_back(n);
    }
  }
  return seen;
}

SurfaceComponent closed_component(ComponentId id, PieceId piece, int genus)
{
  return SurfaceComponent{id, genus, CutComplex{{Piece{piece, genus, 0}}, {}}};
}

int next_piece_id(const ChamberComplex& cx)
{
  int m = -1;
  for (const auto& comp : cx.components)
    for (const auto& p : comp.cut.pieces)
      m = std::max(m, p.id.value);
  return m + 1;
}

int next_curve_id(const ChamberComplex& cx)
{
  int m = -1;
  for (const auto& comp : cx.components)
    for (const auto& k : comp.cut.curves)
      m = std::max(m, k.id.value);
  return m + 1;
}

}  // namespace chamber
