#include <chrono>
#include <functional>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "chamber/catalog.hpp"
#include "chamber/fuzz.hpp"
#include "chamber/oracles.hpp"

using namespace chamber;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

FuzzBounds standard_bounds() { return FuzzBounds{4, 3, 4, 4}; }

Outcome campaign(const std::string& property, std::size_t samples, std::uint64_t seed)
{
  FuzzConfig config;
  config.property = property;
  config.samples = samples;
  config.seed = seed;
  config.bounds = standard_bounds();
  const auto rep = run_fuzz(config);
  Outcome o;
  o.pass = rep.failures == 0 && rep.passes == samples;
  o.detail = fmt::format("{}: {}/{} samples pass", property, rep.passes, samples);
  if (rep.first_failure)
    o.detail += fmt::format(", first failure at {}: {}", *rep.first_failure, rep.detail);
  return o;
}

Outcome both(Outcome a, const Outcome& b)
{
  a.pass = a.pass && b.pass;
  a.detail += "; " + b.detail;
  return a;
}

// Every remnant state the rules can tell apart: what is known about being a
// handlebody or a ball, diskiness, and the flag or goneball choice.
struct RemnantKind {
  bool handlebody;
  bool ball;
  bool known_nonball;
  bool disky;
};

std::vector<RemnantKind> remnant_kinds()
{
  std::vector<RemnantKind> kinds;
  for (bool disky : {false, true}) {
    kinds.push_back({false, false, false, disky});  // nothing known
    kinds.push_back({false, false, true, disky});   // known not a handlebody
    kinds.push_back({true, false, true, disky});    // handlebody, not a ball
    kinds.push_back({true, true, false, disky});    // ball
    kinds.push_back({true, false, false, disky});   // handlebody, ball unknown
  }
  return kinds;
}

// A known handlebody always has a known ball status (it is a ball exactly when
// its boundary is a sphere), so the last kind only reaches the rule checker.
bool realizable(const RemnantView& r) { return !(r.handlebody && !r.ball && !r.known_nonball); }

RemnantView structural(const RemnantKind& k, int id)
{
  RemnantView v;
  v.id = ChamberId{id};
  v.handlebody = k.handlebody;
  v.ball = k.ball;
  v.known_nonball = k.known_nonball;
  v.disky = k.disky;
  return v;
}

// States: 0 empty, 1 occupied, 2 gone (disky balls only).
std::vector<int> states_of(const RemnantView& v)
{
  if (v.disky_ball())
    return {0, 1, 2};
  return {0, 1};
}

void set_state(RemnantView& v, int state)
{
  v.gone = state == 2;
  v.flag = state == 2 ? std::nullopt : std::optional<Flag>(state == 0 ? Flag::Empty : Flag::Occupied);
}

bool agrees(const SplitView& v, std::string& why)
{
  const auto engine = check_split(v);
  const auto literal = oracle::six_rules(v);
  for (int r = 1; r <= kRuleCount; ++r)
    if (engine.rule_ok(r) != literal.rules[r - 1]) {
      why = fmt::format("rule {} differs", r);
      return false;
    }
  if (engine.invalid_empty.empty() != literal.flags_valid) {
    why = "empty-flag validity differs";
    return false;
  }
  return true;
}

Outcome exhaustive_splits()
{
  const auto kinds = remnant_kinds();
  std::size_t structures = 0, flaggings = 0, defaults = 0;
  std::string why;
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      for (bool stabilized : {false, true})
        for (Flag old_flag : {Flag::Empty, Flag::Occupied}) {
          SplitView base{ChamberId{0}, old_flag, stabilized, {}};
          for (int i = 0; i < n; ++i)
            base.remnants.push_back(structural(kinds[pick[i]], i + 1));
          ++structures;

          // Every flagging and goneball subset.
          std::vector<std::vector<int>> states;
          for (const auto& r : base.remnants)
            states.push_back(states_of(r));
          std::vector<std::size_t> at(n, 0);
          while (true) {
            SplitView v = base;
            for (int i = 0; i < n; ++i)
              set_state(v.remnants[i], states[i][at[i]]);
            ++flaggings;
            if (!agrees(v, why))
              return {false, fmt::format("split {} of {} remnants: {}", flaggings, n, why)};
            int i = 0;
            while (i < n && ++at[i] == states[i].size())
              at[i++] = 0;
            if (i == n)
              break;
          }

          // The default choice lands among the consistent ones.
          if (!std::all_of(base.remnants.begin(), base.remnants.end(), realizable))
            continue;
          const auto choice = default_split_choice(base);
          SplitView chosen = base;
          for (auto& r : chosen.remnants) {
            const bool gone = std::find(choice.gone.begin(), choice.gone.end(), r.id) != choice.gone.end();
            r.gone = gone;
            if (!gone)
              r.flag = choice.flags.at(r.id);
          }
          ++defaults;
          const auto literal = oracle::six_rules(chosen);
          if (!literal.consistent() || !literal.flags_valid)
            return {false, fmt::format("default choice on a split of {} remnants is inconsistent", n)};
          if (!agrees(chosen, why))
            return {false, fmt::format("default choice on a split of {} remnants: {}", n, why)};
        }
      int i = 0;
      while (i < n && ++pick[i] == kinds.size())
        pick[i++] = 0;
      if (i == n)
        break;
    }
  }
  return {true, fmt::format("{} splits, {} flaggings agree with the literal rules; {} default choices consistent",
                            structures, flaggings, defaults)};
}

Outcome real_default_successions()
{
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    FuzzConfig config;
    config.seed = 404;
    config.samples = 1000;
    config.bounds = standard_bounds();
    const auto s = generate_instance(config, i);
    const auto before = flagged_of(s);
    const auto raw = surger(before.complex, s.disk_sets.empty() ? DiskSet{} : s.disk_sets.front());
    const auto d = default_succession(before, raw, SuccessionPolicy{});
    if (!check_succession(before, d.raw, d.result).ok())
      return {false, fmt::format("default succession of generated scene {} is inconsistent", i)};
    ++checked;
  }
  return {true, fmt::format("{} default successions on generated scenes are consistent", checked)};
}

Outcome add_disk_catalog_sweep()
{
  const auto cases = add_disk_catalog(3);
  std::size_t agree = 0, blank_left = 0, unclassified = 0;
  std::map<AddDiskOutcome, std::size_t> seen;
  std::string first;
  for (const auto& c : cases) {
    const auto rep = classify_added_disk(c.base, c.disks, c.extra);
    const bool same = isomorphic(rep.c_ed, rep.c_de);
    if ((rep.outcome == AddDiskOutcome::Same) == same && rep.case_consistent)
      ++agree;
    else if (first.empty())
      first = c.name;
    blank_left += rep.simultaneous_blank_left;
    unclassified += rep.outcome == AddDiskOutcome::Unclassified;
    ++seen[rep.outcome];
  }
  Outcome o;
  o.pass = agree == cases.size() && blank_left == 0 && unclassified == 0;
  o.detail = fmt::format("{}/{} configurations agree (same {}, reduces {}, bullseye right {}), "
                         "{} simultaneous blank-left",
                         agree, cases.size(), seen[AddDiskOutcome::Same], seen[AddDiskOutcome::Reduces],
                         seen[AddDiskOutcome::BullseyeRight], blank_left);
  if (!first.empty())
    o.detail += ", first disagreement " + first;
  return o;
}

Outcome quadrant_sweep()
{
  std::vector<std::string> admitting;
  std::size_t configs = 0, mismatches = 0;
  for (auto shape : kVertexShapes) {
    bool admits = false;
    for (const auto& c : enumerate_vertex_configs(shape, 2)) {
      ++configs;
      const auto rep = classify_vertex(c);
      const auto truth = oracle::quadrants(c);
      mismatches += rep.labels != truth.labels || rep.circles != truth.circles;
      const auto& l = truth.labels;
      admits = admits || (l[1].str() == "11" && l[2].str() == "11" && !l[0].balanced() && !l[3].balanced());
    }
    if (admits)
      admitting.push_back(shape_name(shape));
  }
  Outcome o;
  o.pass = admitting.size() == 1 && admitting.front() == shape_name(VertexShape::Crossed) && mismatches == 0;
  o.detail = fmt::format("{} configurations, {} engine/oracle mismatches, shapes admitting P=Q=11: [{}]", configs,
                         mismatches, fmt::join(admitting, ", "));
  return o;
}

Outcome cycle_ledger()
{
  const int n = 5;
  const auto cycle = scripted_cycle(n);
  const int first = cycle.primary.front(), last = cycle.primary.back();
  const auto ans = are_equivalent(cycle.ledger, first, last);
  const bool replays = ans.equivalent && replay_chain(cycle.ledger, ans.chain, first, last);
  const bool connected = oracle::ledger_connected(cycle.ledger, first, last);
  Outcome o;
  o.pass = ans.equivalent && replays && connected && ans.chain.size() == static_cast<std::size_t>(2 * n);
  o.detail = fmt::format("equivalent {}, chain of {} witnesses, replay {}, union-find {}", ans.equivalent,
                         ans.chain.size(), replays, connected);
  return o;
}

}  // namespace

int main()
{
  const std::vector<Criterion> criteria{
      {1, "Euler and genus bookkeeping", 30, [] { return campaign("euler", 10'000, 1); }},
      {2, "disky sides", 0, [] { return campaign("disky", 10'000, 2); }},
      {3, "tinyness pulls back along chains", 60, [] { return campaign("tiny-pullback", 10'000, 3); }},
      {4, "succession rules", 0, [] { return both(exhaustive_splits(), real_default_successions()); }},
      {5, "add-a-disk classification", 0, add_disk_catalog_sweep},
      {6, "bullseye propagation", 0, [] { return campaign("bullseye", 1'000, 6); }},
      {7, "balanced levels and guided runs", 120, [] { return campaign("balance", 1'000, 7); }},
      {8, "quadrant shapes", 0, quadrant_sweep},
      {9, "balanced band", 0,
       [] { return both(campaign("band", 10'000, 9), campaign("annulus-band", 1'000, 9)); }},
      {10, "cycle ledger", 0, cycle_ledger},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s limit", c.limit_seconds);
    }
    failed += !o.pass;
    fmt::print("criterion {:>2} {} [{:.1f} s] {}: {}\n", c.number, o.pass ? "PASS" : "FAIL", secs, c.title,
               o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
