#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chamber/catalog.hpp"
#include "chamber/fuzz.hpp"

using chamber::InputError;
using nlohmann::ordered_json;

namespace {

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

std::string outcome_name(chamber::AddDiskOutcome o)
{
  switch (o) {
    case chamber::AddDiskOutcome::Same: return "same";
    case chamber::AddDiskOutcome::Reduces: return "reduces";
    case chamber::AddDiskOutcome::BullseyeRight: return "bullseye-right";
    case chamber::AddDiskOutcome::BlankBullseyeLeft: return "blank-bullseye-left";
    case chamber::AddDiskOutcome::Unclassified: return "unclassified";
  }
  return "unknown";
}

std::string certificate_name(chamber::CertificateKind k)
{
  switch (k) {
    case chamber::CertificateKind::OccupiedBallBoundary: return "occupied-ball-boundary";
    case chamber::CertificateKind::ReducingSphere: return "reducing-sphere";
    case chamber::CertificateKind::AnnotatedReducible: return "annotated-reducible";
    case chamber::CertificateKind::OccupiedSolidTorus: return "occupied-solid-torus";
  }
  return "unknown";
}

std::string saddle_name(chamber::SaddleVerdict v)
{
  switch (v) {
    case chamber::SaddleVerdict::Equivalent: return "equivalent";
    case chamber::SaddleVerdict::TerminalTorusBothOccupied: return "terminal-torus-both-occupied";
    case chamber::SaddleVerdict::TerminalUnlinkedTori: return "terminal-unlinked-tori";
    case chamber::SaddleVerdict::Unresolved: return "unresolved";
  }
  return "unknown";
}

ordered_json certificates_json(const std::vector<chamber::Certificate>& certs)
{
  ordered_json out = ordered_json::array();
  for (const auto& c : certs)
    out.push_back({{"kind", certificate_name(c.kind)}, {"chamber", c.chamber.value}, {"key", c.key}});
  return out;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

struct Common {
  std::string mode;
  std::string policy = "default";
  std::string out;
};

chamber::Scenario load(const std::string& path, const Common& common)
{
  auto s = chamber::read_scenario_file(path);
  if (!common.mode.empty()) {
    const auto m = chamber::parse_mode(common.mode);
    if (!m)
      throw InputError("unknown mode \"" + common.mode + "\"");
    s.complex.mode = *m;
  }
  return s;
}

chamber::Strategy policy_of(const Common& common)
{
  const auto p = chamber::parse_strategy(common.policy);
  if (!p || *p == chamber::Strategy::Explicit)
    throw InputError("policy must be default or enumerate");
  return *p;
}

// The scenario's flagged complex, with its bullseye inserted when it has one.
chamber::FlaggedComplex start_of(const chamber::Scenario& s)
{
  auto f = chamber::flagged_of(s);
  if (s.bullseye)
    f = chamber::insert_bullseye(f, *s.bullseye).complex;
  return f;
}

void require_valid(const chamber::Scenario& s)
{
  const auto r = chamber::validate_full(s);
  if (!r.ok())
    throw InputError("invalid scenario: " + r.issues.front().code + ": " + r.issues.front().detail);
}

int cmd_validate(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  const auto r = chamber::validate_full(s);
  ordered_json issues = ordered_json::array();
  for (const auto& i : r.issues)
    issues.push_back({{"code", i.code}, {"detail", i.detail}});
  print({{"valid", r.ok()}, {"issues", issues}});
  return r.ok() ? kPass : kFailure;
}

// Applies the disk sets one after another.
chamber::DecompositionSequence run_sequence(const chamber::Scenario& s, chamber::Strategy strategy, int id,
                                            bool* consistent)
{
  chamber::DecompositionSequence seq;
  seq.id = id;
  seq.stages.push_back(start_of(s));
  chamber::SuccessionPolicy policy = s.policy.value_or(chamber::SuccessionPolicy{});
  for (const auto& disks : s.disk_sets) {
    const auto& cur = seq.stages.back();
    const auto raw = chamber::surger(cur.complex, disks);
    if (strategy == chamber::Strategy::Enumerate && consistent) {
      for (const auto& d : chamber::enumerate_successions(cur, raw))
        *consistent = *consistent && chamber::check_succession(cur, d.raw, d.result).ok();
    }
    const auto d = chamber::decompose(cur, disks, policy);
    if (consistent)
      *consistent = *consistent && chamber::check_succession(cur, d.raw, d.result).ok();
    seq.disk_sets.push_back(disks);
    seq.stages.push_back(d.result);
  }
  return seq;
}

int cmd_decompose(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  require_valid(s);
  bool consistent = true;
  const auto seq = run_sequence(s, policy_of(common), 0, &consistent);
  chamber::Scenario result;
  result.complex = seq.stages.back().complex;
  result.flags = seq.stages.back().flags;
  const auto text = chamber::serialize_scenario(result);
  if (!common.out.empty())
    chamber::write_text_file(common.out, text);
  ordered_json stages = ordered_json::array();
  for (std::size_t i = 0; i < seq.stages.size(); ++i)
    stages.push_back({{"chambers", seq.stages[i].complex.chambers.size()},
                      {"components", seq.stages[i].complex.components.size()},
                      {"certificates", certificates_json(seq.stage_certificates(i))}});
  print({{"consistent", consistent}, {"stages", stages}});
  if (common.out.empty())
    std::cout << text;
  return consistent ? kPass : kFailure;
}

int cmd_sweep(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  require_valid(s);
  if (!s.profile || !s.sphere)
    throw InputError("sweep needs events and a sphere");
  const auto levels = chamber::balanced_levels(*s.profile);
  const auto run = chamber::guided_run(start_of(s), *s.profile, s.sphere->level, *s.sphere);
  ordered_json labels = ordered_json::array();
  for (const auto& l : run.labels)
    labels.push_back(l.str());
  ordered_json intervals = ordered_json::array();
  for (const auto& i : levels)
    intervals.push_back({{"lo", i.lo}, {"hi", i.hi}, {"label", i.label.str()}});
  const bool complete = run.status == chamber::RunStatus::Complete;
  print({{"balanced_levels", intervals},
         {"status", complete ? "complete" : "stuck"},
         {"stages", run.sequence.stages.size()},
         {"labels", labels},
         {"certificates", certificates_json(run.certificates)}});
  return complete && !run.certificates.empty() ? kPass : kFailure;
}

int cmd_graphic(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  if (!s.graphic)
    throw InputError("scenario has no graphic");
  if (const auto r = chamber::validate_graphic(*s.graphic); !r.ok())
    throw InputError("invalid graphic: " + r.issues.front().detail);
  const auto b = chamber::balanced_band(*s.graphic);
  ordered_json path_json = ordered_json::array();
  for (const auto& c : b.path)
    path_json.push_back({c.column, c.row});
  const bool ok = b.column_intervals && b.connected && (!s.graphic->annulus || b.essential_loop);
  print({{"band_cells", b.band.size()},
         {"column_intervals", b.column_intervals},
         {"connected", b.connected},
         {"essential_loop", b.essential_loop},
         {"path", path_json}});
  return ok ? kPass : kFailure;
}

int cmd_add_disk(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  require_valid(s);
  if (s.disk_sets.size() != 2 || s.disk_sets[1].size() != 1)
    throw InputError("add-disk needs two disk sets: the disks and then the single extra disk");
  const auto r = chamber::classify_added_disk(start_of(s), s.disk_sets[0], s.disk_sets[1].front());
  const bool same = chamber::isomorphic(r.c_ed, r.c_de);
  print({{"outcome", outcome_name(r.outcome)},
         {"k", r.k},
         {"blank", r.blank},
         {"cases", r.case_labels},
         {"case_consistent", r.case_consistent},
         {"isomorphic", same},
         {"simultaneous_blank_left", r.simultaneous_blank_left}});
  const bool ok = r.outcome != chamber::AddDiskOutcome::Unclassified && r.case_consistent &&
                  (r.outcome == chamber::AddDiskOutcome::Same) == same && !r.simultaneous_blank_left;
  return ok ? kPass : kFailure;
}

int cmd_bullseye(const std::string& path, const Common& common)
{
  const auto s = load(path, common);
  require_valid(s);
  if (!s.bullseye)
    throw InputError("scenario has no bullseye");
  const auto o = chamber::propagate_bullseye(chamber::flagged_of(s), s.disk_sets.empty() ? chamber::DiskSet{}
                                                                                         : s.disk_sets.front(),
                                             *s.bullseye);
  const char* kind = o.kind == chamber::BullseyeOutcome::Persists        ? "persists"
                     : o.kind == chamber::BullseyeOutcome::HostReducible ? "host-reducible"
                                                                         : "unresolved";
  print({{"outcome", kind}, {"k_before", s.bullseye->k}, {"k", o.k}, {"blank", o.blank}, {"crossings", o.crossings}});
  return o.kind == chamber::BullseyeOutcome::Persists && o.k < s.bullseye->k ? kFailure : kPass;
}

int cmd_vertex(const std::string& shape_text, int max_genus)
{
  const auto shape = chamber::parse_shape(shape_text);
  if (!shape)
    throw InputError("unknown shape \"" + shape_text + "\"");
  const auto configs = chamber::enumerate_vertex_configs(*shape, max_genus);
  std::size_t both_high = 0;
  ordered_json example;
  for (const auto& c : configs) {
    const auto r = chamber::classify_vertex(c);
    const auto& l = r.labels;
    if (l[1].str() == "11" && l[2].str() == "11" && !l[0].balanced() && !l[3].balanced()) {
      if (both_high++ == 0)
        example = {{"N", l[0].str()}, {"P", l[1].str()}, {"Q", l[2].str()}, {"R", l[3].str()},
                   {"circles", r.circles}, {"equivalent", r.equivalent}, {"reason", r.reason}};
    }
  }
  print({{"shape", chamber::shape_name(*shape)},
         {"configurations", configs.size()},
         {"p_q_11_with_n_r_unbalanced", both_high},
         {"example", example}});
  return kPass;
}

int cmd_saddle(const std::string& before_path, const std::string& after_path, bool maxmin, const Common& common)
{
  const auto before = load(before_path, common);
  const auto after = load(after_path, common);
  require_valid(before);
  if (!before.sphere || !after.sphere)
    throw InputError("both scenarios need a sphere");
  chamber::Transition t{maxmin ? chamber::TangencyKind::MaxMin : chamber::TangencyKind::Saddle, *before.sphere,
                        *after.sphere};
  const auto r = chamber::classify_saddle(start_of(before), t);
  print({{"verdict", saddle_name(r.verdict)}, {"k", r.k}, {"reason", r.reason}});
  return r.verdict == chamber::SaddleVerdict::Unresolved ? kFailure : kPass;
}

ordered_json chain_json(const std::vector<chamber::InteractionWitness>& chain)
{
  ordered_json out = ordered_json::array();
  for (const auto& w : chain)
    out.push_back({{"from", w.seq_a}, {"stage_from", w.stage_a}, {"to", w.seq_b}, {"stage_to", w.stage_b},
                   {"shared", w.shared}});
  return out;
}

int cmd_ledger(const std::vector<std::string>& paths, int cycle, const Common& common)
{
  if (cycle > 0) {
    const auto c = chamber::scripted_cycle(cycle);
    const int first = c.primary.front(), last = c.primary.back();
    const auto ans = chamber::are_equivalent(c.ledger, first, last);
    const bool replays = ans.equivalent && chamber::replay_chain(c.ledger, ans.chain, first, last);
    print({{"from", first}, {"to", last}, {"equivalent", ans.equivalent}, {"replays", replays},
           {"chain", chain_json(ans.chain)}});
    return replays ? kPass : kFailure;
  }
  if (paths.empty())
    throw InputError("ledger needs scenario files or --cycle");
  std::vector<chamber::DecompositionSequence> seqs;
  chamber::EquivalenceLedger ledger;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto s = load(paths[i], common);
    require_valid(s);
    seqs.push_back(run_sequence(s, chamber::Strategy::Default, static_cast<int>(i), nullptr));
    ledger.register_sequence(seqs.back());
  }
  for (std::size_t a = 0; a < seqs.size(); ++a)
    for (std::size_t b = a + 1; b < seqs.size(); ++b)
      ledger = chamber::relate_sequences(seqs[a], seqs[b], std::move(ledger));
  bool ok = true;
  ordered_json pairs = ordered_json::array();
  for (std::size_t a = 0; a < seqs.size(); ++a)
    for (std::size_t b = a + 1; b < seqs.size(); ++b) {
      const auto ans = chamber::are_equivalent(ledger, static_cast<int>(a), static_cast<int>(b));
      const bool replays =
          !ans.equivalent || chamber::replay_chain(ledger, ans.chain, static_cast<int>(a), static_cast<int>(b));
      ok = ok && replays;
      pairs.push_back({{"a", paths[a]}, {"b", paths[b]}, {"equivalent", ans.equivalent}, {"chain", chain_json(ans.chain)}});
    }
  ordered_json certifies = ordered_json::array();
  for (const auto& s : seqs)
    certifies.push_back(s.certifies());
  print({{"certifies", certifies}, {"pairs", pairs}});
  return ok ? kPass : kFailure;
}

struct FuzzArgs {
  std::string property = "validate";
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  std::string replay;
  chamber::FuzzBounds bounds;
  unsigned threads = 0;
  bool list = false;
};

int cmd_fuzz(const FuzzArgs& a, const Common& common)
{
  if (a.list) {
    for (const auto& p : chamber::property_names())
      std::cout << p << '\n';
    return kPass;
  }
  if (!chamber::known_property(a.property))
    throw InputError("unknown property \"" + a.property + "\"");
  chamber::FuzzConfig config;
  config.property = a.property;
  config.seed = a.seed;
  config.samples = a.samples;
  config.bounds = a.bounds;
  config.policy = policy_of(common);
  config.threads = a.threads;
  if (!common.mode.empty()) {
    const auto m = chamber::parse_mode(common.mode);
    if (!m)
      throw InputError("unknown mode \"" + common.mode + "\"");
    config.mode = *m;
  }
  if (!a.replay.empty()) {
    const auto s = chamber::read_scenario_file(a.replay);
    const auto r = chamber::replay(a.property, s, config);
    print({{"property", a.property}, {"pass", r.pass}, {"detail", r.detail}});
    return r.pass ? kPass : kFailure;
  }
  const auto rep = chamber::run_fuzz(config);
  ordered_json j{{"property", rep.property},
                 {"seed", config.seed},
                 {"samples", config.samples},
                 {"passes", rep.passes},
                 {"failures", rep.failures},
                 {"seconds", rep.seconds}};
  if (rep.first_failure) {
    j["first_failure"] = *rep.first_failure;
    j["detail"] = rep.detail;
    if (rep.counterexample) {
      const std::string path = common.out.empty() ? "counterexample.json" : common.out;
      chamber::write_text_file(path, chamber::serialize_scenario(*rep.counterexample));
      j["counterexample"] = path;
    }
  }
  print(j);
  return rep.failures == 0 ? kPass : kFailure;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Flagged chamber complex engine"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool policy, bool out) {
    sub->add_option("--mode", common.mode, "Ambient mode override")->check(CLI::IsMember({"sphere", "annotated"}));
    if (policy)
      sub->add_option("--policy", common.policy, "Succession policy")->check(CLI::IsMember({"default", "enumerate"}));
    if (out)
      sub->add_option("--out", common.out, "Output file");
  };

  std::string file, file2;
  auto* validate = app.add_subcommand("validate", "Check a scenario against every structural rule");
  validate->add_option("scenario", file)->required();
  add_common(validate, false, false);

  auto* decompose = app.add_subcommand("decompose", "Apply the disk sets in order and flag the result");
  decompose->add_option("scenario", file)->required();
  add_common(decompose, true, true);

  auto* sweep = app.add_subcommand("sweep", "Guided decomposition at the sphere's level");
  sweep->add_option("scenario", file)->required();
  add_common(sweep, false, false);

  auto* graphic = app.add_subcommand("graphic", "Balanced band of a graphic");
  graphic->add_option("scenario", file)->required();
  add_common(graphic, false, false);

  auto* classify = app.add_subcommand("classify", "Classification reports");
  classify->require_subcommand(1);
  auto* add_disk = classify->add_subcommand("add-disk", "Compare adding the extra disk first and last");
  add_disk->add_option("scenario", file)->required();
  add_common(add_disk, false, false);
  auto* bullseye = classify->add_subcommand("bullseye", "Propagate an inserted bullseye through surgery");
  bullseye->add_option("scenario", file)->required();
  add_common(bullseye, false, false);
  std::string shape = "crossed";
  int max_genus = 1;
  auto* vertex = classify->add_subcommand("vertex", "Quadrant labels around a double-saddle vertex");
  vertex->add_option("--shape", shape, "Graph shape");
  vertex->add_option("--max-genus", max_genus, "Largest genus per side component")->check(CLI::Range(0, 4));
  bool maxmin = false;
  auto* saddle = classify->add_subcommand("saddle", "Compare guided runs across a tangency");
  saddle->add_option("before", file)->required();
  saddle->add_option("after", file2)->required();
  saddle->add_flag("--maxmin", maxmin, "The tangency is a maximum or minimum");
  add_common(saddle, false, false);

  std::vector<std::string> ledger_files;
  int cycle = 0;
  auto* ledger = app.add_subcommand("ledger", "Relate decomposition sequences by shared certificates");
  ledger->add_option("scenarios", ledger_files);
  ledger->add_option("--cycle", cycle, "Run the scripted cycle of this many steps")->check(CLI::Range(1, 1000));
  add_common(ledger, false, false);

  FuzzArgs fz;
  auto* fuzz = app.add_subcommand("fuzz", "Run a property campaign");
  fuzz->add_option("--property", fz.property, "Property name");
  fuzz->add_option("--seed", fz.seed, "Campaign seed");
  fuzz->add_option("--samples", fz.samples, "Number of samples");
  fuzz->add_option("--replay", fz.replay, "Re-check a saved counterexample");
  fuzz->add_option("--threads", fz.threads, "Worker threads (0: all cores)");
  fuzz->add_option("--max-components", fz.bounds.max_components);
  fuzz->add_option("--max-genus", fz.bounds.max_genus);
  fuzz->add_option("--max-disks", fz.bounds.max_disks);
  fuzz->add_option("--max-sequence", fz.bounds.max_sequence);
  fuzz->add_flag("--list", fz.list, "List the properties");
  add_common(fuzz, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*validate)
      return cmd_validate(file, common);
    if (*decompose)
      return cmd_decompose(file, common);
    if (*sweep)
      return cmd_sweep(file, common);
    if (*graphic)
      return cmd_graphic(file, common);
    if (*add_disk)
      return cmd_add_disk(file, common);
    if (*bullseye)
      return cmd_bullseye(file, common);
    if (*vertex)
      return cmd_vertex(shape, max_genus);
    if (*saddle)
      return cmd_saddle(file, file2, maxmin, common);
    if (*ledger)
      return cmd_ledger(ledger_files, cycle, common);
    if (*fuzz)
      return cmd_fuzz(fz, common);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const chamber::ContractViolation& e) {
    std::cerr << "invariant broken: " << e.what() << '\n';
    return kFailure;
  }
  return kInputError;
}
