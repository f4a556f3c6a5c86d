#include "chamber/sweepout.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include <boost/pending/disjoint_sets.hpp>
#include <fmt/format.h>

namespace chamber {

std::optional<Label> parse_label(const std::string& text)
{
  if (text.size() != 2)
    return std::nullopt;
  auto digit = [](char c) -> std::optional<bool> {
    if (c == '0')
      return false;
    if (c == '1')
      return true;
    return std::nullopt;
  };
  auto a = digit(text[0]), b = digit(text[1]);
  if (!a || !b)
    return std::nullopt;
  return Label{*a, *b};
}

ValidationReport validate_profile(const LevelProfile& profile)
{
  ValidationReport r;
  int above = 0, below = 0;
  std::int64_t prev = 0;
  for (const auto& e : profile.events) {
    if (e.s <= 0 || e.s >= kLevelScale)
      r.issues.push_back({"profile-range", fmt::format("event at {} is outside (0, {})", e.s, kLevelScale)});
    if (e.s <= prev && &e != &profile.events.front())
      r.issues.push_back({"profile-order", fmt::format("event at {} does not follow {}", e.s, prev)});
    prev = e.s;
    above += e.effect == DigitEffect::Above;
    below += e.effect == DigitEffect::Below;
  }
  if (above != 1 || below != 1)
    r.issues.push_back({"profile-monotonicity",
                        fmt::format("each digit must flip exactly once (above {}, below {})", above, below)});
  return r;
}

namespace {

void require_profile(const LevelProfile& profile)
{
  if (auto r = validate_profile(profile); !r.ok())
    throw InputError(fmt::format("invalid profile: {} ({})", r.issues.front().code, r.issues.front().detail));
}

void apply(Label& l, DigitEffect e)
{
  if (e == DigitEffect::Above)
    l.above = false;
  else if (e == DigitEffect::Below)
    l.below = true;
}

}  // namespace

Label label_at(const LevelProfile& profile, std::int64_t s)
{
  require_profile(profile);
  if (s <= 0 || s >= kLevelScale)
    throw InputError(fmt::format("level {} is outside (0, {})", s, kLevelScale));
  Label l;
  for (const auto& e : profile.events) {
    if (e.s == s)
      throw InputError(fmt::format("level {} is an event level", s));
    if (e.s < s)
      apply(l, e.effect);
  }
  return l;
}

std::vector<LevelInterval> balanced_levels(const LevelProfile& profile)
{
  require_profile(profile);
  std::vector<LevelInterval> out;
  Label l;
  std::int64_t lo = 0;
  auto close = [&](std::int64_t hi) {
    if (!l.balanced() || hi <= lo + 1)
      return;
    // Balanced gaps are adjacent (one digit moves per event), so they merge.
    if (!out.empty() && out.back().hi == lo && out.back().label == l)
      out.back().hi = hi;
    else
      out.push_back({lo, hi, l});
  };
  for (const auto& e : profile.events) {
    close(e.s);
    apply(l, e.effect);
    lo = e.s;
  }
  close(kLevelScale);
  return out;
}

const GuideFace& GuideSphere::face(int id) const
{
  for (const auto& f : faces)
    if (f.id == id)
      return f;
  throw InputError(fmt::format("guide {} has no face {}", this->id, id));
}

int GuideSphere::degree(int f) const
{
  return static_cast<int>(std::count_if(circles.begin(), circles.end(),
                                        [&](const GuideCircle& c) { return c.face_a == f || c.face_b == f; }));
}

namespace {

// Connected components of a set of faces under the circles, as union-find roots.
bool faces_form_tree(const GuideSphere& g)
{
  if (g.faces.size() != g.circles.size() + 1)
    return false;
  std::map<int, int> index;
  for (std::size_t i = 0; i < g.faces.size(); ++i)
    index[g.faces[i].id] = static_cast<int>(i);
  boost::disjoint_sets_with_storage<> uf(g.faces.size());
  for (std::size_t i = 0; i < g.faces.size(); ++i)
    uf.make_set(i);
  for (const auto& c : g.circles) {
    const auto a = uf.find_set(index.at(c.face_a)), b = uf.find_set(index.at(c.face_b));
    if (a == b)
      return false;
    uf.link(a, b);
  }
  return true;
}

std::optional<Side> side_of_piece(const GuideSphere& g, PieceId p)
{
  auto it = g.sides.find(p);
  if (it == g.sides.end())
    return std::nullopt;
  return it->second;
}

}  // namespace

ValidationReport validate_guide(const ChamberComplex& cx, const GuideSphere& g)
{
  ValidationReport r;
  std::set<int> face_ids;
  for (const auto& f : g.faces) {
    if (!face_ids.insert(f.id).second)
      r.issues.push_back({"guide-face-duplicate", fmt::format("face {}", f.id)});
    if (!cx.find_chamber(f.chamber))
      r.issues.push_back({"guide-face-chamber", fmt::format("face {} names chamber {}", f.id, f.chamber.value)});
  }
  std::set<CurveId> used;
  bool refs_ok = true;
  std::set<CurveId> circle_curves;
  for (const auto& c : g.circles) {
    if (!face_ids.contains(c.face_a) || !face_ids.contains(c.face_b) || c.face_a == c.face_b) {
      r.issues.push_back({"guide-face-unknown", fmt::format("circle on curve {}", c.curve.value)});
      refs_ok = false;
      continue;
    }
    if (!used.insert(c.curve).second)
      r.issues.push_back({"guide-curve-reused", fmt::format("curve {}", c.curve.value)});
    circle_curves.insert(c.curve);
    auto comp = cx.component_of_curve(c.curve);
    if (!comp) {
      r.issues.push_back({"guide-curve-unknown", fmt::format("curve {}", c.curve.value)});
      continue;
    }
    const auto& inc = cx.incidence_of(*comp);
    const auto ca = g.face(c.face_a).chamber, cb = g.face(c.face_b).chamber;
    if (!((ca == inc.side_a && cb == inc.side_b) || (ca == inc.side_b && cb == inc.side_a)))
      r.issues.push_back({"guide-circle-chambers",
                          fmt::format("circle on curve {} does not separate its faces' chambers", c.curve.value)});
  }
  if (refs_ok && r.issues.empty() && !faces_form_tree(g))
    r.issues.push_back({"guide-not-tree", "faces and circles do not form a tree"});
  if (g.faces.empty())
    r.issues.push_back({"guide-not-tree", "guide has no faces"});
  for (const auto& comp : cx.components) {
    for (const auto& p : comp.cut.pieces)
      if (!g.sides.contains(p.id))
        r.issues.push_back({"guide-side-missing", fmt::format("piece {}", p.id.value)});
    for (const auto& k : comp.cut.curves) {
      auto sa = side_of_piece(g, k.a.piece), sb = side_of_piece(g, k.b.piece);
      if (!sa || !sb)
        continue;
      const bool crossing = *sa != *sb;
      if (crossing != circle_curves.contains(k.id))
        r.issues.push_back({"guide-side-inconsistent",
                            fmt::format("curve {} {} the sphere", k.id.value, crossing ? "crosses" : "misses")});
    }
  }
  return r;
}

Label guide_label(const ChamberComplex& cx, const GuideSphere& g)
{
  Label out{false, false};
  for (const auto& comp : cx.components) {
    for (Side side : {Side::Above, Side::Below}) {
      std::vector<const Piece*> ps;
      std::map<PieceId, int> index;
      for (const auto& p : comp.cut.pieces)
        if (side_of_piece(g, p.id) == side) {
          index[p.id] = static_cast<int>(ps.size());
          ps.push_back(&p);
        }
      if (ps.empty())
        continue;
      boost::disjoint_sets_with_storage<> uf(ps.size());
      for (std::size_t i = 0; i < ps.size(); ++i)
        uf.make_set(i);
      std::vector<std::pair<int, int>> kept;
      for (const auto& k : comp.cut.curves)
        if (index.contains(k.a.piece) && index.contains(k.b.piece)) {
          kept.emplace_back(index.at(k.a.piece), index.at(k.b.piece));
          uf.union_set(kept.back().first, kept.back().second);
        }
      std::map<std::size_t, int> genus;
      for (std::size_t i = 0; i < ps.size(); ++i)
        genus[uf.find_set(i)] += ps[i]->genus - 1;
      for (const auto& [a, b] : kept)
        ++genus[uf.find_set(a)];
      for (const auto& [root, g0] : genus)
        if (g0 + 1 > 0)
          (side == Side::Above ? out.above : out.below) = true;
    }
  }
  return out;
}

DiskSet guided_disks(const ChamberComplex& cx, const GuideSphere& g)
{
  DiskSet out;
  std::vector<int> leaves;
  for (const auto& f : g.faces)
    if (g.degree(f.id) == 1)
      leaves.push_back(f.id);
  std::sort(leaves.begin(), leaves.end());
  if (g.faces.size() == 2 && !leaves.empty())
    leaves.resize(1);
  int next = 0;
  for (int f : leaves) {
    const auto& c = *std::find_if(g.circles.begin(), g.circles.end(),
                                  [&](const GuideCircle& x) { return x.face_a == f || x.face_b == f; });
    auto comp = cx.component_of_curve(c.curve);
    if (!comp)
      throw InputError(fmt::format("guide circle on unknown curve {}", c.curve.value));
    out.push_back(DiskAttachment{DiskId{next++}, g.face(f).chamber, *comp, c.curve, std::nullopt, c.carries});
  }
  const auto nesting = compute_nesting(cx, out);
  for (auto& d : out)
    if (auto it = nesting.find(d.id); it != nesting.end())
      d.nesting_parent = it->second;
  return out;
}

namespace {

ChamberId current_of_raw(const RawComplex& step, ChamberId raw)
{
  for (const auto& [cur, region] : step.region)
    if (region.contains(raw))
      return cur;
  throw ContractViolation(fmt::format("raw chamber {} lies in no current chamber", raw.value));
}

}  // namespace

GuideSphere transport_guide(const GuideSphere& guide, const RawComplex& step)
{
  const auto& cx = step.complex;
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < guide.faces.size(); ++i)
    index[guide.faces[i].id] = i;
  boost::disjoint_sets_with_storage<> uf(guide.faces.size());
  for (std::size_t i = 0; i < guide.faces.size(); ++i)
    uf.make_set(i);

  std::vector<GuideCircle> kept, removed;
  for (const auto& c : guide.circles) {
    if (cx.component_of_curve(c.curve)) {
      kept.push_back(c);
    } else {
      removed.push_back(c);
      uf.union_set(index.at(c.face_a), index.at(c.face_b));
    }
  }

  // Every kept circle tells which current chamber each of its faces lies in.
  std::map<std::size_t, ChamberId> group_chamber;
  auto assign = [&](std::size_t root, ChamberId ch) {
    auto [it, fresh] = group_chamber.emplace(root, ch);
    if (!fresh && it->second != ch)
      throw InputError(fmt::format("guide {} is inconsistent with the disk sides chosen by its carries", guide.id));
  };
  for (const auto& c : kept) {
    const auto comp = *cx.component_of_curve(c.curve);
    const auto& inc = step.raw.incidence_of(comp);
    for (int f : {c.face_a, c.face_b}) {
      const ChamberId old = guide.face(f).chamber;
      std::optional<ChamberId> raw_side;
      for (auto s : {inc.side_a, inc.side_b})
        if (step.remnant.at(s) == old)
          raw_side = s;
      if (!raw_side)
        throw ContractViolation(fmt::format("circle on curve {} lost its face chamber", c.curve.value));
      assign(uf.find_set(index.at(f)), current_of_raw(step, *raw_side));
    }
  }

  // Slots of surgered curves identify their scar records.
  std::map<Slot, const ScarRecord*> scar_by_slot;
  for (const auto& s : step.scars)
    for (const auto& comp : step.raw.components)
      for (const auto& k : comp.cut.curves)
        if (k.b == Slot{s.scar_a, 0})
          scar_by_slot[k.a] = &s;
  auto fallback_chamber = [&](std::size_t root) -> ChamberId {
    for (const auto& c : removed) {
      if (uf.find_set(index.at(c.face_a)) != root)
        continue;
      const auto old_comp = step.before.component_of_curve(c.curve);
      if (!old_comp)
        continue;
      const Curve& k = *step.before.component(*old_comp).cut.find_curve(c.curve);
      if (auto it = scar_by_slot.find(k.a); it != scar_by_slot.end())
        return current_of_raw(step, it->second->handle_chamber);
    }
    for (const auto& f : guide.faces)
      if (uf.find_set(index.at(f.id)) == root)
        for (auto raw : step.raw_remnants(f.chamber))
          return current_of_raw(step, raw);
    if (cx.chambers.size() == 1)
      return cx.chambers.front().id;
    throw ContractViolation(fmt::format("guide {} lost track of a face", guide.id));
  };

  GuideSphere out;
  out.id = guide.id;
  out.level = guide.level;
  // Each merged face keeps the smallest id of its members.
  std::map<std::size_t, int> face_of_root;
  std::vector<GuideFace> sorted = guide.faces;
  std::sort(sorted.begin(), sorted.end(), [](const GuideFace& a, const GuideFace& b) { return a.id < b.id; });
  for (const auto& f : sorted) {
    const auto root = uf.find_set(index.at(f.id));
    if (face_of_root.contains(root))
      continue;
    face_of_root[root] = f.id;
    auto it = group_chamber.find(root);
    out.faces.push_back(GuideFace{f.id, it != group_chamber.end() ? it->second : fallback_chamber(root)});
  }
  for (auto c : kept) {
    c.face_a = face_of_root.at(uf.find_set(index.at(c.face_a)));
    c.face_b = face_of_root.at(uf.find_set(index.at(c.face_b)));
    std::erase_if(c.carries, [&](PieceId p) { return !cx.component_of_piece(p); });
    out.circles.push_back(c);
  }

  for (const auto& comp : cx.components)
    for (const auto& p : comp.cut.pieces)
      if (auto s = side_of_piece(guide, p.id))
        out.sides[p.id] = *s;
  for (const auto& s : step.scars)
    for (const auto& comp : step.raw.components)
      for (const auto& k : comp.cut.curves)
        for (PieceId scar : {s.scar_a, s.scar_b})
          if (k.b == Slot{scar, 0} && cx.component_of_piece(scar))
            if (auto side = side_of_piece(guide, k.a.piece))
              out.sides[scar] = *side;
  return out;
}

namespace {

std::optional<GuideWitness> terminal_witness(const ChamberComplex& cx, const GuideSphere& g)
{
  if (!g.circles.empty() || g.faces.size() != 1)
    return std::nullopt;
  GuideWitness w{g.id, g.faces.front().chamber, {}, {}};
  for (auto b : cx.chamber(w.chamber).boundary) {
    const auto& comp = cx.component(b);
    if (comp.cut.pieces.empty())
      continue;
    if (auto s = side_of_piece(g, comp.cut.pieces.front().id))
      (*s == Side::Above ? w.above : w.below).push_back(b);
  }
  return w;
}

void require_guide(const ChamberComplex& cx, const GuideSphere& g)
{
  if (auto r = validate_guide(cx, g); !r.ok())
    throw InputError(fmt::format("invalid guide {}: {} ({})", g.id, r.issues.front().code, r.issues.front().detail));
}

}  // namespace

GuidedRun guided_walk(const FlaggedComplex& flagged, const GuideSphere& guide, const CertificateOptions& options)
{
  require_guide(flagged.complex, guide);
  GuidedRun run;
  run.sequence.id = guide.id;
  run.sequence.guide = guide.id;
  run.sequence.piece_bound =
      options.piece_bound == INT_MAX ? next_piece_id(flagged.complex) : options.piece_bound;
  run.sequence.stages.push_back(flagged);
  run.guides.push_back(guide);
  run.labels.push_back(guide_label(flagged.complex, guide));
  while (!run.guides.back().circles.empty()) {
    const auto& stage = run.sequence.stages.back();
    const auto& g = run.guides.back();
    DiskSet disks = guided_disks(stage.complex, g);
    if (disks.empty()) {
      run.status = RunStatus::Stuck;
      break;
    }
    auto dec = decompose(stage, disks);
    GuideSphere next = transport_guide(g, dec.raw);
    if (next.circles.size() >= g.circles.size())
      throw ContractViolation(fmt::format("guide {} did not lose a circle", guide.id));
    const Label l = guide_label(dec.result.complex, next);
    if (l != run.labels.back())
      throw ContractViolation(fmt::format("guide {} changed label from {} to {}", guide.id, run.labels.back().str(), l.str()));
    run.sequence.disk_sets.push_back(std::move(disks));
    run.sequence.stages.push_back(std::move(dec.result));
    run.guides.push_back(std::move(next));
    run.labels.push_back(l);
  }
  if (run.status == RunStatus::Complete)
    run.sequence.terminal_guide = terminal_witness(run.sequence.stages.back().complex, run.guides.back());
  run.certificates = run.sequence.stage_certificates(run.sequence.stages.size() - 1);
  if (options.solid_torus_certifies)
    run.certificates = certificates(run.sequence.stages.back(), CertificateOptions{true, run.sequence.piece_bound},
                                    run.sequence.terminal_guide);
  return run;
}

GuidedRun guided_run(const FlaggedComplex& flagged, const LevelProfile& profile, std::int64_t s_star,
                     const GuideSphere& guide, const CertificateOptions& options)
{
  const Label l = label_at(profile, s_star);
  if (!l.balanced())
    throw InputError(fmt::format("level {} has unbalanced label {}", s_star, l.str()));
  require_guide(flagged.complex, guide);
  const Label gl = guide_label(flagged.complex, guide);
  if (gl != l)
    throw InputError(fmt::format("guide label {} disagrees with profile label {}", gl.str(), l.str()));
  return guided_walk(flagged, guide, options);
}

DelayedDiskReport classify_delayed_disk(const FlaggedComplex& start, const DiskAttachment& extra,
                                        const GuideSphere& guide, EquivalenceLedger* ledger)
{
  for (const auto& c : guide.circles)
    if (c.curve == extra.curve)
      throw InputError("the extra disk must miss the guide sphere");
  DelayedDiskReport rep;
  rep.plain = guided_walk(start, guide);
  rep.plain.sequence.id = 2 * guide.id;

  std::optional<DiskAttachment> e = extra;
  bool all_same = true;
  for (std::size_t i = 0; i < rep.plain.sequence.disk_sets.size() && all_same; ++i) {
    const auto& stage = rep.plain.sequence.stages[i];
    const auto& disks = rep.plain.sequence.disk_sets[i];
    if (!e || std::any_of(disks.begin(), disks.end(), [&](const DiskAttachment& d) { return d.curve == e->curve; })) {
      e.reset();
      break;
    }
    DiskAttachment ei = *e;
    ei.nesting_parent.reset();
    ei.id = DiskId{static_cast<int>(disks.size())};
    const auto step = classify_added_disk(stage, disks, ei);
    switch (step.outcome) {
      case AddDiskOutcome::Same:
        e = transport_disk(decompose(stage, disks).raw, ei);
        continue;
      case AddDiskOutcome::BullseyeRight:
        rep.outcome = DelayedOutcome::BullseyeLeft;
        break;
      case AddDiskOutcome::BlankBullseyeLeft:
        rep.outcome = DelayedOutcome::BlankBullseyeRight;
        break;
      default:
        rep.outcome = DelayedOutcome::Unresolved;
        break;
    }
    rep.stage = i;
    rep.k = step.k;
    all_same = false;
  }
  if (all_same) {
    rep.outcome = DelayedOutcome::StepwiseE;
    rep.stage = rep.plain.sequence.disk_sets.size();
    return rep;
  }
  if (rep.outcome != DelayedOutcome::Unresolved)
    return rep;

  // The ladder broke without a bullseye: look for a shared certificate instead.
  DiskAttachment e0 = extra;
  e0.nesting_parent.reset();
  auto first = decompose(start, {e0});
  GuideSphere moved = transport_guide(guide, first.raw);
  rep.with_extra = guided_walk(first.result, moved, CertificateOptions{false, next_piece_id(start.complex)});
  auto& seq = rep.with_extra.sequence;
  seq.id = 2 * guide.id + 1;
  seq.stages.insert(seq.stages.begin(), start);
  seq.disk_sets.insert(seq.disk_sets.begin(), DiskSet{e0});
  const auto related = relate_sequences(rep.plain.sequence, seq, EquivalenceLedger{});
  if (!related.witnesses().empty()) {
    rep.witness = related.witnesses().front();
    rep.outcome = DelayedOutcome::Interact;
    if (ledger) {
      if (!ledger->registered(rep.plain.sequence.id))
        ledger->register_sequence(rep.plain.sequence);
      if (!ledger->registered(seq.id))
        ledger->register_sequence(seq);
      ledger->add_witness(*rep.witness);
    }
  }
  return rep;
}

namespace {

int count_genus(const ChamberComplex& cx, int genus)
{
  return static_cast<int>(
      std::count_if(cx.components.begin(), cx.components.end(), [&](const auto& c) { return c.genus == genus; }));
}

}  // namespace

SaddleReport classify_saddle(const FlaggedComplex& flagged, const Transition& t)
{
  require_guide(flagged.complex, t.before);
  require_guide(flagged.complex, t.after);
  const auto nb = static_cast<long>(t.before.circles.size()), na = static_cast<long>(t.after.circles.size());
  if (std::abs(nb - na) > 1)
    throw InputError("a single tangency changes the circle count by at most one");
  if (t.kind == TangencyKind::MaxMin)
    return {SaddleVerdict::Equivalent, 0, "a birth or death bounds a disk on the sphere and issues nothing new"};
  const Label lb = guide_label(flagged.complex, t.before), la = guide_label(flagged.complex, t.after);
  if (lb.balanced() && la.balanced())
    return {SaddleVerdict::Equivalent, 0, "both levels are balanced and the runs share the untouched faces"};
  if (!lb.balanced() && !la.balanced())
    throw InputError("neither side of the transition is balanced");
  const GuideSphere& unbalanced = lb.balanced() ? t.after : t.before;
  const auto walk = guided_walk(flagged, unbalanced);
  if (walk.status == RunStatus::Complete && !walk.certificates.empty())
    return {SaddleVerdict::Equivalent, 0, "the unbalanced run still certifies"};
  const auto& terminal = walk.sequence.stages.back();
  const auto& cx = terminal.complex;
  if (cx.components.size() == 1 && cx.components.front().genus == 1 &&
      std::all_of(terminal.flags.begin(), terminal.flags.end(), [](const auto& f) { return f.second == Flag::Occupied; }))
    return {SaddleVerdict::TerminalTorusBothOccupied, 0, "the run ends at one torus with both sides occupied"};
  if (count_genus(cx, 1) == 2 && count_genus(cx, 0) + 2 == static_cast<int>(cx.components.size())) {
    for (const auto& ch : cx.chambers)
      if (terminal.flag(ch.id) == Flag::Empty && effective_annotation(cx, ch).is_solid_torus == Tri::Yes) {
        const int k = count_genus(cx, 0);
        return {SaddleVerdict::TerminalUnlinkedTori, k,
                fmt::format("the run ends at two unlinked tori separated by {} spheres", k)};
      }
  }
  return {SaddleVerdict::Unresolved, 0, "no certificate and no recognised terminal shape"};
}

CompressReport level_compress_check(const FlaggedComplex& flagged, const LevelProfile& profile,
                                    const GuideSphere& at_e, int face, const GuideSphere& balanced)
{
  require_guide(flagged.complex, at_e);
  require_guide(flagged.complex, balanced);
  if (at_e.degree(face) != 1)
    throw InputError(fmt::format("face {} of guide {} is not bounded by a single circle", face, at_e.id));
  const Label lb = label_at(profile, balanced.level);
  if (!lb.balanced() || guide_label(flagged.complex, balanced) != lb)
    throw InputError("the comparison guide must sit at a balanced level and agree with the profile");
  if (at_e.level >= balanced.level)
    throw InputError("the compressing level must lie below the balanced level");
  const auto& c = *std::find_if(at_e.circles.begin(), at_e.circles.end(),
                                [&](const GuideCircle& x) { return x.face_a == face || x.face_b == face; });
  for (const auto& bc : balanced.circles)
    if (bc.curve == c.curve)
      throw InputError("the compressing disk meets the balanced sphere");
  const DiskAttachment e{DiskId{0}, at_e.face(face).chamber, *flagged.complex.component_of_curve(c.curve), c.curve,
                         std::nullopt, c.carries};
  auto dec = decompose(flagged, {e});
  if (isomorphic(flagged, dec.result))
    return {CompressVerdict::Equivalent, "the compression leaves the complex unchanged up to isomorphism"};
  const GuideSphere moved = transport_guide(balanced, dec.raw);
  const auto run = guided_walk(flagged, balanced);
  const auto run2 = guided_walk(dec.result, moved, CertificateOptions{false, next_piece_id(flagged.complex)});
  if (!run.certificates.empty() && !run2.certificates.empty())
    return {CompressVerdict::Equivalent, "both runs certify"};
  for (const auto* r : {&run2, &run}) {
    const auto& cx = r->sequence.stages.back().complex;
    const auto& g = r->guides.back();
    int above = 0, below = 0;
    for (const auto& comp : cx.components) {
      if (comp.genus != 1 || comp.cut.pieces.empty())
        continue;
      auto it = g.sides.find(comp.cut.pieces.front().id);
      if (it == g.sides.end())
        continue;
      (it->second == Side::Above ? above : below)++;
    }
    if (cx.components.size() == 2 && above == 1 && below == 1)
      return {CompressVerdict::TerminalTorusPair, "the run ends at one torus above and one below the sphere"};
  }
  return {CompressVerdict::Unresolved, "no certificate and no recognised terminal shape"};
}

std::string shape_name(VertexShape shape)
{
  switch (shape) {
    case VertexShape::SeparateLobeLobe: return "separate-lobe-lobe";
    case VertexShape::SeparateLobeOuter: return "separate-lobe-outer";
    case VertexShape::SeparateOuterOuter: return "separate-outer-outer";
    case VertexShape::ChainInside: return "chain-inside";
    case VertexShape::ChainOutside: return "chain-outside";
    case VertexShape::Crossed: return "crossed";
  }
  return "unknown";
}

std::optional<VertexShape> parse_shape(const std::string& name)
{
  for (auto s : kVertexShapes)
    if (shape_name(s) == name)
      return s;
  return std::nullopt;
}

namespace {

// Half-edge i at vertex v is numbered 4 * v + i, counterclockwise.
using Edges = std::vector<std::pair<int, int>>;

Edges shape_edges(VertexShape shape)
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
  throw InputError("unknown vertex shape");
}

int smoothing_partner(int h, bool first)
{
  const int v = h / 4, i = h % 4;
  const int j = first ? (i ^ 1) : (i == 0 ? 3 : i == 3 ? 0 : i == 1 ? 2 : 1);
  return 4 * v + j;
}

// Circles of a resolution, as the circle index of every edge.
std::vector<int> resolve(const Edges& edges, std::array<bool, 2> first, int& count)
{
  std::vector<int> edge_at(8);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    edge_at[edges[e].first] = e;
    edge_at[edges[e].second] = e;
  }
  std::vector<int> circle(edges.size(), -1);
  count = 0;
  for (int e0 = 0; e0 < static_cast<int>(edges.size()); ++e0) {
    if (circle[e0] >= 0)
      continue;
    int e = e0, h = edges[e0].second;
    while (circle[e] < 0) {
      circle[e] = count;
      const int q = smoothing_partner(h, first[h / 4]);
      e = edge_at[q];
      h = edges[e].first == q ? edges[e].second : edges[e].first;
    }
    ++count;
  }
  return circle;
}

// Components of the surface on one side, tracked through band moves.
struct SideState {
  std::array<bool, 2> smoothing;
  std::vector<int> circle_of_edge;
  std::vector<int> component;  // per circle
  std::vector<int> genus;      // per component id
};

SideState band(const Edges& edges, SideState s, int v)
{
  const int h0 = 4 * v, h1 = smoothing_partner(h0, s.smoothing[v]);
  int other = 4 * v;
  for (int i = 0; i < 4; ++i)
    if (4 * v + i != h0 && 4 * v + i != h1) {
      other = 4 * v + i;
      break;
    }
  auto edge_of = [&](int h) {
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
      if (edges[e].first == h || edges[e].second == h)
        return e;
    throw ContractViolation("dangling half-edge");
  };
  const int c1 = s.circle_of_edge[edge_of(h0)], c2 = s.circle_of_edge[edge_of(other)];
  int k1 = s.component[c1], k2 = s.component[c2];
  if (c1 != c2) {
    if (k1 == k2) {
      ++s.genus[k1];
    } else {
      s.genus[std::min(k1, k2)] += s.genus[std::max(k1, k2)];
      s.genus[std::max(k1, k2)] = 0;
      for (auto& k : s.component)
        if (k == std::max(k1, k2))
          k = std::min(k1, k2);
    }
  }
  SideState out = s;
  out.smoothing[v] = !out.smoothing[v];
  int count = 0;
  out.circle_of_edge = resolve(edges, out.smoothing, count);
  out.component.assign(count, -1);
  for (std::size_t e = 0; e < edges.size(); ++e)
    out.component[out.circle_of_edge[e]] = s.component[s.circle_of_edge[e]];
  return out;
}

bool positive(const SideState& s)
{
  std::set<int> used(s.component.begin(), s.component.end());
  return std::any_of(used.begin(), used.end(), [&](int k) { return s.genus[k] > 0; });
}

void check_partition(const SidePartition& p, int circles, const char* which)
{
  if (static_cast<int>(p.block.size()) != circles)
    throw InputError(fmt::format("{} partition covers {} circles, expected {}", which, p.block.size(), circles));
  for (int b : p.block)
    if (b < 0 || b >= static_cast<int>(p.genus.size()))
      throw InputError(fmt::format("{} partition names block {} out of range", which, b));
  for (int g : p.genus)
    if (g < 0)
      throw InputError(fmt::format("{} partition has negative genus", which));
}

}  // namespace

int resolution_circles(VertexShape shape, bool first_at_v1, bool first_at_v2)
{
  int count = 0;
  resolve(shape_edges(shape), {first_at_v1, first_at_v2}, count);
  return count;
}

VertexReport classify_vertex(const QuadrantConfig& config)
{
  const Edges edges = shape_edges(config.shape);
  const std::array<bool, 2> up = config.up_first;
  const std::array<bool, 2> down{!up[0], !up[1]};
  VertexReport rep;

  SideState above{up, {}, config.above.block, config.above.genus};
  int n_count = 0;
  above.circle_of_edge = resolve(edges, up, n_count);
  check_partition(config.above, n_count, "above");
  SideState below{down, {}, config.below.block, config.below.genus};
  int r_count = 0;
  below.circle_of_edge = resolve(edges, down, r_count);
  check_partition(config.below, r_count, "below");

  // Pushing a vertex down adds a band above it; pushing up adds one below.
  const auto a_p = band(edges, above, 0), a_q = band(edges, above, 1), a_r = band(edges, a_p, 1);
  const auto b_q = band(edges, below, 0), b_p = band(edges, below, 1), b_n = band(edges, b_p, 0);
  rep.labels[static_cast<int>(Quadrant::N)] = Label{positive(above), positive(b_n)};
  rep.labels[static_cast<int>(Quadrant::P)] = Label{positive(a_p), positive(b_p)};
  rep.labels[static_cast<int>(Quadrant::Q)] = Label{positive(a_q), positive(b_q)};
  rep.labels[static_cast<int>(Quadrant::R)] = Label{positive(a_r), positive(below)};
  rep.circles[static_cast<int>(Quadrant::N)] = n_count;
  rep.circles[static_cast<int>(Quadrant::P)] = resolution_circles(config.shape, down[0], up[1]);
  rep.circles[static_cast<int>(Quadrant::Q)] = resolution_circles(config.shape, up[0], down[1]);
  rep.circles[static_cast<int>(Quadrant::R)] = r_count;

  const Label p = rep.labels[static_cast<int>(Quadrant::P)], q = rep.labels[static_cast<int>(Quadrant::Q)];
  const Label n = rep.labels[static_cast<int>(Quadrant::N)], r = rep.labels[static_cast<int>(Quadrant::R)];
  if (!p.balanced() || !q.balanced()) {
    rep.reason = "P and Q are not both balanced";
  } else if (n.balanced() || r.balanced()) {
    rep.equivalent = true;
    rep.reason = "a balanced neighbouring quadrant joins P and Q by balanced isotopy";
  } else if (p.above && q.above) {
    rep.equivalent = true;
    rep.reason = "non-planar pair: both resolutions reach the same separating surface";
  } else if (!p.above && !q.above) {
    rep.equivalent = true;
    rep.reason = "planar pair: meridian and longitude compressions give isotopic spheres (assumed)";
  } else {
    rep.equivalent = true;
    rep.reason = "mixed pair: the empty side is a solid torus whose spheres certify both runs";
  }
  return rep;
}

namespace {

// Restricted growth strings: every set partition of n items.
void partitions(int n, std::vector<int>& cur, int blocks, std::vector<std::pair<std::vector<int>, int>>& out)
{
  if (static_cast<int>(cur.size()) == n) {
    out.emplace_back(cur, blocks);
    return;
  }
  for (int b = 0; b <= blocks; ++b) {
    cur.push_back(b);
    partitions(n, cur, std::max(blocks, b + 1), out);
    cur.pop_back();
  }
}

std::vector<SidePartition> side_partitions(int circles, int max_genus)
{
  std::vector<std::pair<std::vector<int>, int>> raw;
  std::vector<int> cur;
  partitions(circles, cur, 0, raw);
  std::vector<SidePartition> out;
  for (const auto& [block, blocks] : raw) {
    std::vector<int> genus(blocks, 0);
    while (true) {
      out.push_back({block, genus});
      int i = 0;
      while (i < blocks && genus[i] == max_genus)
        genus[i++] = 0;
      if (i == blocks)
        break;
      ++genus[i];
    }
  }
  return out;
}

}  // namespace

std::vector<QuadrantConfig> enumerate_vertex_configs(VertexShape shape, int max_genus)
{
  if (max_genus < 0)
    throw InputError("max_genus must be non-negative");
  std::vector<QuadrantConfig> out;
  for (int mask = 0; mask < 4; ++mask) {
    const std::array<bool, 2> up{(mask & 1) != 0, (mask & 2) != 0};
    const auto above = side_partitions(resolution_circles(shape, up[0], up[1]), max_genus);
    const auto below = side_partitions(resolution_circles(shape, !up[0], !up[1]), max_genus);
    for (const auto& a : above)
      for (const auto& b : below)
        out.push_back({shape, up, a, b});
  }
  return out;
}

ValidationReport validate_graphic(const Graphic& g)
{
  ValidationReport r;
  if (g.columns() == 0 || g.rows() < 2) {
    r.issues.push_back({"graphic-shape", "a graphic needs at least one column and two rows"});
    return r;
  }
  for (const auto& col : g.regions)
    if (static_cast<int>(col.size()) != g.rows()) {
      r.issues.push_back({"graphic-shape", "columns differ in height"});
      return r;
    }
  auto jump = [](const Label& a, const Label& b) { return (a.above != b.above) + (a.below != b.below) > 1; };
  for (int c = 0; c < g.columns(); ++c) {
    const auto& col = g.regions[c];
    if (col.front() != Label{true, false} || col.back() != Label{false, true})
      r.issues.push_back({"graphic-ends", fmt::format("column {} must run from 10 to 01", c)});
    for (int s = 1; s < g.rows(); ++s) {
      if ((!col[s - 1].above && col[s].above) || (col[s - 1].below && !col[s].below))
        r.issues.push_back({"graphic-monotonicity", fmt::format("column {} row {}", c, s)});
      if (jump(col[s - 1], col[s]))
        r.issues.push_back({"graphic-jump", fmt::format("column {} rows {}-{}", c, s - 1, s)});
    }
    const int next = c + 1;
    if (next < g.columns() || (g.annulus && g.columns() > 1)) {
      const auto& other = g.regions[next % g.columns()];
      for (int s = 0; s < g.rows(); ++s)
        if (jump(col[s], other[s]))
          r.issues.push_back({"graphic-jump", fmt::format("columns {}-{} row {}", c, next % g.columns(), s)});
    }
  }
  return r;
}

BandReport balanced_band(const Graphic& g)
{
  if (auto r = validate_graphic(g); !r.ok())
    throw InputError(fmt::format("invalid graphic: {} ({})", r.issues.front().code, r.issues.front().detail));
  const int w = g.columns(), h = g.rows();
  BandReport rep;
  auto in_band = [&](int c, int s) { return g.regions[c][s].balanced(); };
  rep.column_intervals = true;
  for (int c = 0; c < w; ++c) {
    int runs = 0;
    for (int s = 0; s < h; ++s) {
      if (in_band(c, s))
        rep.band.push_back({c, s});
      if (in_band(c, s) && (s == 0 || !in_band(c, s - 1)))
        ++runs;
    }
    rep.column_intervals = rep.column_intervals && runs == 1;
  }
  if (rep.band.empty())
    return rep;

  // Cells touching at an edge or a corner have touching closures.
  auto neighbours = [&](Cell x) {
    std::vector<std::pair<Cell, int>> out;  // cell and winding change
    for (int dc = -1; dc <= 1; ++dc)
      for (int ds = -1; ds <= 1; ++ds) {
        if ((dc == 0 && ds == 0) || x.row + ds < 0 || x.row + ds >= h)
          continue;
        int c = x.column + dc, wind = 0;
        if (c < 0 || c >= w) {
          if (!g.annulus)
            continue;
          wind = c < 0 ? -1 : 1;
          c = (c + w) % w;
        }
        if (in_band(c, x.row + ds))
          out.push_back({Cell{c, x.row + ds}, wind});
      }
    return out;
  };

  std::set<Cell> seen{rep.band.front()};
  std::deque<Cell> queue{rep.band.front()};
  while (!queue.empty()) {
    const Cell x = queue.front();
    queue.pop_front();
    for (const auto& [y, wind] : neighbours(x))
      if (seen.insert(y).second)
        queue.push_back(y);
  }
  rep.connected = seen.size() == rep.band.size();

  // Search the cover of the annulus (winding in [-1, 1]) or the square itself.
  using State = std::pair<Cell, int>;
  std::map<State, State> parent;
  std::deque<State> frontier;
  for (int s = 0; s < h; ++s)
    if (in_band(0, s)) {
      const State st{Cell{0, s}, 0};
      parent.emplace(st, st);
      frontier.push_back(st);
    }
  std::optional<State> goal;
  if (!g.annulus && w == 1)
    goal = frontier.front();
  while (!frontier.empty() && !goal) {
    const State st = frontier.front();
    frontier.pop_front();
    for (const auto& [y, dw] : neighbours(st.first)) {
      const int wind = st.second + dw;
      if (wind < -1 || wind > 1)
        continue;
      const State next{y, wind};
      if (!parent.emplace(next, st).second)
        continue;
      const bool done = g.annulus ? (wind == 1 && y.column == 0) : y.column == w - 1;
      if (done) {
        goal = next;
        break;
      }
      frontier.push_back(next);
    }
  }
  if (goal) {
    for (State st = *goal;; st = parent.at(st)) {
      rep.path.push_back(st.first);
      if (parent.at(st) == st)
        break;
    }
    std::reverse(rep.path.begin(), rep.path.end());
    rep.essential_loop = g.annulus;
  }
  return rep;
}

}  // namespace chamber
