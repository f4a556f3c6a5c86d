#include "chamber/flags.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace chamber {

bool ConsistencyReport::ok() const
{
  return invalid_empty.empty() &&
         std::all_of(violations.begin(), violations.end(), [](const auto& v) { return v.empty(); });
}

ConsistencyReport check_split(const SplitView& view)
{
  ConsistencyReport rep;
  auto& v = rep.violations;
  const auto& rs = view.remnants;
  for (const auto& r : rs) {
    if (r.gone)
      continue;
    const Flag f = r.flag.value_or(Flag::Occupied);
    if (!r.disky_handlebody() && f != Flag::Occupied)
      v[0].push_back(r.id);
    if (r.ball && f != Flag::Occupied)
      v[1].push_back(r.id);
    if (f == Flag::Empty && !(r.handlebody && r.known_nonball))
      rep.invalid_empty.push_back(r.id);
  }
  if (view.old_flag != Flag::Occupied)
    return rep;
  auto occupied = [](const RemnantView& r) { return !r.gone && r.flag.value_or(Flag::Occupied) == Flag::Occupied; };
  if (std::none_of(rs.begin(), rs.end(), occupied))
    v[2].push_back(view.old);
  const bool occupied_dhb =
      std::any_of(rs.begin(), rs.end(), [&](const RemnantView& r) { return occupied(r) && r.disky_handlebody(); });
  const bool all_dhb = std::all_of(rs.begin(), rs.end(), [](const RemnantView& r) { return r.gone || r.disky_handlebody(); });
  if (occupied_dhb && !all_dhb)
    v[3].push_back(view.old);
  const bool all_dball = std::all_of(rs.begin(), rs.end(), [](const RemnantView& r) { return r.gone || r.disky_ball(); });
  if (!all_dball) {
    if (std::any_of(rs.begin(), rs.end(), [](const RemnantView& r) { return !r.gone && r.disky_ball(); }))
      v[4].push_back(view.old);
  } else {
    const auto survivors = std::count_if(rs.begin(), rs.end(), [](const RemnantView& r) { return !r.gone; });
    if (survivors != 1 || std::none_of(rs.begin(), rs.end(), occupied))
      v[5].push_back(view.old);
  }
  return rep;
}

std::vector<SplitView> split_views(const FlaggedComplex& before, const RawComplex& raw,
                                   const std::optional<FlagMap>& after_flags, const SuccessionPolicy& policy)
{
  std::vector<SplitView> views;
  for (const auto& ch : before.complex.chambers) {
    SplitView view;
    view.old = ch.id;
    view.old_flag = before.flags.at(ch.id);
    view.stabilized = policy.is_stabilized(ch.id);
    auto rems = raw.raw_remnants(ch.id);
    std::sort(rems.begin(), rems.end());
    for (auto r : rems) {
      RemnantView rv;
      rv.id = r;
      rv.gone = raw.gone.contains(r);
      if (rv.gone) {
        rv.disky = rv.handlebody = rv.ball = true;
      } else {
        const auto a = effective_annotation(raw.complex, r);
        rv.disky = chamber_is_disky(raw, r);
        rv.handlebody = a.is_handlebody == Tri::Yes;
        rv.ball = a.is_ball == Tri::Yes;
        rv.known_nonball = a.is_ball == Tri::No;
        if (after_flags) {
          auto it = after_flags->find(r);
          if (it == after_flags->end())
            throw InputError(fmt::format("no flag for chamber {}", r.value));
          rv.flag = it->second;
        }
      }
      view.remnants.push_back(rv);
    }
    if (view.remnants.empty())
      throw InputError(fmt::format("remnant map has no remnant for chamber {}", ch.id.value));
    views.push_back(std::move(view));
  }
  return views;
}

namespace {

void merge_report(ConsistencyReport& into, const ConsistencyReport& r)
{
  for (int i = 0; i < kRuleCount; ++i)
    into.violations[i].insert(into.violations[i].end(), r.violations[i].begin(), r.violations[i].end());
  into.invalid_empty.insert(into.invalid_empty.end(), r.invalid_empty.begin(), r.invalid_empty.end());
}

// Prunes the chosen chambers, waiting for nested ones to become candidates.
RawComplex prune_all(const RawComplex& raw, std::vector<ChamberId> chosen)
{
  RawComplex state = raw;
  std::sort(chosen.begin(), chosen.end());
  while (!chosen.empty()) {
    const auto cands = goneball_candidates(state).chambers;
    auto it = std::find_if(chosen.begin(), chosen.end(), [&](ChamberId z) {
      return std::find(cands.begin(), cands.end(), z) != cands.end();
    });
    if (it == chosen.end())
      throw InputError(fmt::format("chamber {} is not a goneball candidate", chosen.front().value));
    state = prune(state, {*it});
    chosen.erase(it);
  }
  return state;
}

// Every consistent flagging of the survivors of one split.
std::vector<std::map<ChamberId, Flag>> consistent_flaggings(const SplitView& view)
{
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < view.remnants.size(); ++i)
    if (!view.remnants[i].gone)
      survivors.push_back(i);
  if (survivors.size() > 20)
    throw InputError("too many remnants to enumerate");
  std::vector<std::map<ChamberId, Flag>> out;
  for (std::uint32_t mask = 0; mask < (1u << survivors.size()); ++mask) {
    SplitView v = view;
    std::map<ChamberId, Flag> flags;
    for (std::size_t j = 0; j < survivors.size(); ++j) {
      auto& r = v.remnants[survivors[j]];
      r.flag = (mask >> j) & 1u ? Flag::Empty : Flag::Occupied;
      flags[r.id] = *r.flag;
    }
    if (check_split(v).ok())
      out.push_back(std::move(flags));
  }
  return out;
}

std::vector<std::vector<std::map<ChamberId, Flag>>> flaggings_per_split(const FlaggedComplex& before,
                                                                        const RawComplex& state)
{
  std::vector<std::vector<std::map<ChamberId, Flag>>> per;
  for (const auto& v : split_views(before, state, std::nullopt))
    per.push_back(consistent_flaggings(v));
  return per;
}

}  // namespace

ConsistencyReport check_succession(const FlaggedComplex& before, const RawComplex& raw, const FlaggedComplex& after)
{
  if (!(after.complex == raw.complex))
    throw InputError("successor does not match the surgered complex");
  ConsistencyReport rep;
  for (const auto& v : split_views(before, raw, after.flags))
    merge_report(rep, check_split(v));
  return rep;
}

SplitChoice default_split_choice(const SplitView& view)
{
  SplitChoice out;
  const auto& rs = view.remnants;
  const bool all_dhb = std::all_of(rs.begin(), rs.end(), [](const RemnantView& r) { return r.gone || r.disky_handlebody(); });
  auto empty_ok = [](const RemnantView& r) { return r.disky_handlebody() && r.known_nonball; };
  if (view.old_flag == Flag::Empty || !all_dhb) {
    for (const auto& r : rs) {
      if (r.gone || r.disky_ball())
        out.gone.push_back(r.id);
      else
        out.flags[r.id] = empty_ok(r) ? Flag::Empty : Flag::Occupied;
    }
    return out;
  }
  // Every remnant is a disky handlebody: exactly one keeps the occupancy.
  std::optional<ChamberId> keeper;
  for (const auto& r : rs)
    if (!r.gone && !r.ball) {
      keeper = r.id;
      break;
    }
  if (keeper) {
    for (const auto& r : rs) {
      if (r.gone || r.ball)
        out.gone.push_back(r.id);
      else
        out.flags[r.id] = r.id == *keeper || !empty_ok(r) ? Flag::Occupied : Flag::Empty;
    }
    return out;
  }
  for (const auto& r : rs)
    if (!r.gone) {
      keeper = r.id;
      break;
    }
  for (const auto& r : rs) {
    if (keeper && r.id == *keeper)
      out.flags[r.id] = Flag::Occupied;
    else
      out.gone.push_back(r.id);
  }
  return out;
}

Decomposition apply_assignment(const FlaggedComplex& before, const RawComplex& raw, const Assignment& assignment)
{
  Decomposition d;
  d.raw = prune_all(raw, assignment.goneballs);
  d.result = FlaggedComplex{d.raw.complex, assignment.flags};
  if (auto rep = check_succession(before, d.raw, d.result); !rep.ok())
    throw InputError("explicit succession breaks the consistency rules");
  return d;
}

Decomposition default_succession(const FlaggedComplex& before, const RawComplex& raw, const SuccessionPolicy& policy)
{
  RawComplex state = raw;
  FlagMap flags;
  for (int round = 0; round < 8; ++round) {
    flags.clear();
    std::vector<ChamberId> wanted;
    for (const auto& v : split_views(before, state, std::nullopt, policy)) {
      auto choice = default_split_choice(v);
      for (auto g : choice.gone)
        if (!state.gone.contains(g))
          wanted.push_back(g);
      flags.insert(choice.flags.begin(), choice.flags.end());
    }
    bool progressed = false;
    std::sort(wanted.begin(), wanted.end());
    for (auto z : wanted) {
      const auto cands = goneball_candidates(state).chambers;
      if (std::find(cands.begin(), cands.end(), z) != cands.end()) {
        state = prune(state, {z});
        progressed = true;
      }
    }
    if (!progressed)
      break;
  }
  Decomposition d{FlaggedComplex{state.complex, flags}, state};
  if (d.result.flags.size() == d.result.complex.chambers.size() && check_succession(before, state, d.result).ok())
    return d;
  auto all = enumerate_successions(before, raw, 1);
  if (all.empty())
    throw ContractViolation("no consistent succession exists");
  return all.front();
}

std::vector<Decomposition> enumerate_successions(const FlaggedComplex& before, const RawComplex& raw, std::size_t limit)
{
  std::vector<Decomposition> out;
  std::set<std::set<ChamberId>> visited;
  std::vector<RawComplex> frontier{raw};
  while (!frontier.empty() && out.size() < limit) {
    RawComplex state = std::move(frontier.back());
    frontier.pop_back();
    if (!visited.insert(state.gone).second)
      continue;
    const auto cands = goneball_candidates(state).chambers;
    if (cands.size() > 12)
      throw InputError("too many goneball candidates to enumerate");
    for (std::uint32_t mask = (1u << cands.size()) - 1; mask >= 1; --mask) {
      std::vector<ChamberId> chosen;
      for (std::size_t j = 0; j < cands.size(); ++j)
        if ((mask >> j) & 1u)
          chosen.push_back(cands[j]);
      try {
        frontier.push_back(prune(state, chosen));
      } catch (const InputError&) {
      }
    }
    auto per = flaggings_per_split(before, state);
    if (std::any_of(per.begin(), per.end(), [](const auto& x) { return x.empty(); }))
      continue;
    std::vector<std::size_t> pick(per.size(), 0);
    while (out.size() < limit) {
      FlagMap flags;
      for (std::size_t i = 0; i < per.size(); ++i)
        flags.insert(per[i][pick[i]].begin(), per[i][pick[i]].end());
      out.push_back(Decomposition{FlaggedComplex{state.complex, flags}, state});
      std::size_t i = 0;
      for (; i < per.size(); ++i) {
        if (++pick[i] < per[i].size())
          break;
        pick[i] = 0;
      }
      if (i == per.size())
        break;
    }
  }
  return out;
}

Decomposition random_succession(const FlaggedComplex& before, const RawComplex& raw, std::mt19937_64& rng)
{
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    RawComplex state = raw;
    for (int level = 0; level < 8; ++level) {
      std::vector<ChamberId> chosen;
      for (auto c : goneball_candidates(state).chambers)
        if (coin(rng))
          chosen.push_back(c);
      if (chosen.empty())
        break;
      try {
        state = prune(state, chosen);
      } catch (const InputError&) {
        break;
      }
    }
    auto per = flaggings_per_split(before, state);
    if (std::any_of(per.begin(), per.end(), [](const auto& x) { return x.empty(); }))
      continue;
    FlagMap flags;
    for (const auto& options : per) {
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      const auto& f = options[pick(rng)];
      flags.insert(f.begin(), f.end());
    }
    return Decomposition{FlaggedComplex{state.complex, flags}, state};
  }
  return default_succession(before, raw, {});
}

Decomposition decompose(const FlaggedComplex& flagged, const DiskSet& disks, const SuccessionPolicy& policy)
{
  if (auto rep = validate_flags(flagged.complex, flagged.flags); !rep.ok())
    throw InputError("invalid flags: " + rep.issues.front().detail);
  const RawComplex raw = surger(flagged.complex, disks);
  switch (policy.strategy) {
    case Strategy::Default:
      return default_succession(flagged, raw, policy);
    case Strategy::Enumerate: {
      auto all = enumerate_successions(flagged, raw, 1);
      if (all.empty())
        throw ContractViolation("no consistent succession exists");
      return all.front();
    }
    case Strategy::Explicit:
      if (!policy.assignment)
        throw InputError("explicit strategy without an assignment");
      return apply_assignment(flagged, raw, *policy.assignment);
  }
  throw InputError("unknown strategy");
}

TinyVerdict is_tiny(const FlaggedComplex& flagged)
{
  const auto& cx = flagged.complex;
  if (cx.components.empty())
    return TinyVerdict::Tiny;
  bool unknown = false;
  for (const auto& [id, f] : flagged.flags)
    if (f == Flag::Empty && effective_annotation(cx, id).is_handlebody != Tri::Yes)
      unknown = true;
  for (const auto& c : cx.chambers) {
    bool all_empty = true;
    for (const auto& o : cx.chambers)
      if (o.id != c.id && flagged.flags.at(o.id) != Flag::Empty)
        all_empty = false;
    if (all_empty)
      return unknown ? TinyVerdict::Unknown : TinyVerdict::Tiny;
  }
  return TinyVerdict::NotTiny;
}

TinyVerdict is_tiny_unflagged(const ChamberComplex& cx)
{
  if (cx.components.empty())
    return TinyVerdict::Tiny;
  bool maybe = false;
  for (const auto& c : cx.chambers) {
    bool all_yes = true, none_no = true;
    for (const auto& o : cx.chambers) {
      if (o.id == c.id)
        continue;
      const auto hb = effective_annotation(cx, o).is_handlebody;
      all_yes = all_yes && hb == Tri::Yes;
      none_no = none_no && hb != Tri::No;
    }
    if (all_yes)
      return TinyVerdict::Tiny;
    maybe = maybe || none_no;
  }
  return maybe ? TinyVerdict::Unknown : TinyVerdict::NotTiny;
}

}  // namespace chamber
