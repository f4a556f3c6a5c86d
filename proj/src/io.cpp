#include "chamber/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace chamber {

using nlohmann::json;

std::string flag_name(Flag f) { return f == Flag::Empty ? "empty" : "occupied"; }

std::string strategy_name(Strategy s)
{
  switch (s) {
    case Strategy::Default: return "default";
    case Strategy::Enumerate: return "enumerate";
    case Strategy::Explicit: return "explicit";
  }
  return "default";
}

std::optional<Strategy> parse_strategy(const std::string& name)
{
  for (auto s : {Strategy::Default, Strategy::Enumerate, Strategy::Explicit})
    if (strategy_name(s) == name)
      return s;
  return std::nullopt;
}

std::string mode_name(AmbientMode m) { return m == AmbientMode::Sphere ? "sphere" : "annotated"; }

std::optional<AmbientMode> parse_mode(const std::string& name)
{
  if (name == "sphere")
    return AmbientMode::Sphere;
  if (name == "annotated")
    return AmbientMode::Annotated;
  return std::nullopt;
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
  throw InputError(fmt::format("scenario {}: {}", where, what));
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
  if (!j.is_object())
    bad(where, "expected an object");
  for (const auto& [k, v] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      bad(where, fmt::format("unknown key \"{}\"", k));
}

const json& need(const json& j, const std::string& where, const char* key)
{
  if (!j.contains(key))
    bad(where, fmt::format("missing key \"{}\"", key));
  return j.at(key);
}

int as_int(const json& j, const std::string& where)
{
  if (!j.is_number_integer())
    bad(where, "expected an integer");
  return j.get<int>();
}

std::int64_t as_int64(const json& j, const std::string& where)
{
  if (!j.is_number_integer())
    bad(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& where)
{
  if (!j.is_string())
    bad(where, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& where)
{
  if (!j.is_array())
    bad(where, "expected an array");
  return j;
}

const char* tri_name(Tri t) { return t == Tri::Yes ? "yes" : t == Tri::No ? "no" : "unknown"; }

Tri parse_tri(const json& j, const std::string& where)
{
  const auto s = as_string(j, where);
  if (s == "yes")
    return Tri::Yes;
  if (s == "no")
    return Tri::No;
  if (s == "unknown")
    return Tri::Unknown;
  bad(where, fmt::format("\"{}\" is not yes/no/unknown", s));
}

template <class T>
std::vector<int> ids(const std::vector<T>& xs)
{
  std::vector<int> out;
  for (const auto& x : xs)
    out.push_back(x.value);
  return out;
}

json slot_json(const Slot& s) { return json::array({s.piece.value, s.index}); }

Slot parse_slot(const json& j, const std::string& where)
{
  if (!j.is_array() || j.size() != 2)
    bad(where, "a slot is [piece, index]");
  return Slot{PieceId{as_int(j[0], where)}, as_int(j[1], where)};
}

json disk_json(const DiskAttachment& d)
{
  json j{{"id", d.id.value},
         {"chamber", d.chamber.value},
         {"component", d.component.value},
         {"curve", d.curve.value},
         {"carries", ids(d.carries)}};
  if (d.nesting_parent)
    j["nesting_parent"] = d.nesting_parent->value;
  return j;
}

DiskAttachment parse_disk(const json& j, const std::string& where)
{
  only_keys(j, where, {"id", "chamber", "component", "curve", "carries", "nesting_parent"});
  DiskAttachment d;
  d.id = DiskId{as_int(need(j, where, "id"), where)};
  d.chamber = ChamberId{as_int(need(j, where, "chamber"), where)};
  d.component = ComponentId{as_int(need(j, where, "component"), where)};
  d.curve = CurveId{as_int(need(j, where, "curve"), where)};
  if (j.contains("carries"))
    for (const auto& p : as_array(j.at("carries"), where))
      d.carries.push_back(PieceId{as_int(p, where)});
  std::sort(d.carries.begin(), d.carries.end());
  if (j.contains("nesting_parent"))
    d.nesting_parent = DiskId{as_int(j.at("nesting_parent"), where)};
  return d;
}

const char* kind_name(EventKind k) { return k == EventKind::Birth ? "birth" : k == EventKind::Death ? "death" : "saddle"; }
const char* effect_name(DigitEffect e) { return e == DigitEffect::Above ? "above" : e == DigitEffect::Below ? "below" : "none"; }

json guide_json(const GuideSphere& g)
{
  json faces = json::array(), circles = json::array(), sides = json::array();
  for (const auto& f : g.faces)
    faces.push_back({{"id", f.id}, {"chamber", f.chamber.value}});
  for (const auto& c : g.circles)
    circles.push_back({{"curve", c.curve.value}, {"faces", {c.face_a, c.face_b}}, {"carries", ids(c.carries)}});
  for (const auto& [p, s] : g.sides)
    sides.push_back({{"piece", p.value}, {"side", s == Side::Above ? "above" : "below"}});
  return json{{"id", g.id}, {"level", g.level}, {"faces", faces}, {"circles", circles}, {"sides", sides}};
}

GuideSphere parse_guide(const json& j)
{
  const std::string w = "sphere";
  only_keys(j, w, {"id", "level", "faces", "circles", "sides"});
  GuideSphere g;
  g.id = as_int(need(j, w, "id"), w);
  g.level = as_int64(need(j, w, "level"), w);
  for (const auto& f : as_array(need(j, w, "faces"), w)) {
    only_keys(f, w + ".faces", {"id", "chamber"});
    g.faces.push_back({as_int(need(f, w, "id"), w), ChamberId{as_int(need(f, w, "chamber"), w)}});
  }
  for (const auto& c : as_array(need(j, w, "circles"), w)) {
    only_keys(c, w + ".circles", {"curve", "faces", "carries"});
    const auto& fs = need(c, w, "faces");
    if (!fs.is_array() || fs.size() != 2)
      bad(w, "a circle has two faces");
    GuideCircle gc{CurveId{as_int(need(c, w, "curve"), w)}, as_int(fs[0], w), as_int(fs[1], w), {}};
    if (c.contains("carries"))
      for (const auto& p : as_array(c.at("carries"), w))
        gc.carries.push_back(PieceId{as_int(p, w)});
    g.circles.push_back(gc);
  }
  for (const auto& s : as_array(need(j, w, "sides"), w)) {
    only_keys(s, w + ".sides", {"piece", "side"});
    const auto name = as_string(need(s, w, "side"), w);
    if (name != "above" && name != "below")
      bad(w, fmt::format("side \"{}\" is not above/below", name));
    g.sides[PieceId{as_int(need(s, w, "piece"), w)}] = name == "above" ? Side::Above : Side::Below;
  }
  return g;
}

void canonicalize(Scenario& s)
{
  s.complex.sort_canonical();
  for (auto& set : s.disk_sets)
    std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  if (s.sphere) {
    std::sort(s.sphere->faces.begin(), s.sphere->faces.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(s.sphere->circles.begin(), s.sphere->circles.end(),
              [](const auto& a, const auto& b) { return a.curve < b.curve; });
  }
}

}  // namespace

std::string serialize_scenario(const Scenario& input)
{
  Scenario s = input;
  canonicalize(s);
  json j;
  j["ambient_mode"] = mode_name(s.complex.mode);
  json comps = json::array();
  for (const auto& c : s.complex.components) {
    json pieces = json::array(), curves = json::array();
    for (const auto& p : c.cut.pieces)
      pieces.push_back({{"id", p.id.value}, {"genus", p.genus}, {"slots", p.slots}});
    for (const auto& k : c.cut.curves)
      curves.push_back({{"id", k.id.value}, {"a", slot_json(k.a)}, {"b", slot_json(k.b)}});
    comps.push_back({{"id", c.id.value}, {"pieces", pieces}, {"curves", curves}});
  }
  j["components"] = comps;
  json chambers = json::array();
  for (const auto& ch : s.complex.chambers) {
    json punct = json::array();
    for (const auto& g : ch.punctures)
      punct.push_back(ids(g));
    const auto& a = ch.annotation;
    chambers.push_back({{"id", ch.id.value},
                        {"boundary", ids(ch.boundary)},
                        {"annotation",
                         {{"ball", tri_name(a.is_ball)},
                          {"handlebody", tri_name(a.is_handlebody)},
                          {"solid_torus", tri_name(a.is_solid_torus)},
                          {"reducible", tri_name(a.is_reducible)}}},
                        {"punctures", punct}});
  }
  j["chambers"] = chambers;
  json inc = json::array();
  for (const auto& i : s.complex.incidence)
    inc.push_back({{"component", i.component.value}, {"sides", {i.side_a.value, i.side_b.value}}});
  j["incidence"] = inc;
  json sets = json::array();
  for (const auto& set : s.disk_sets) {
    json ds = json::array();
    for (const auto& d : set)
      ds.push_back(disk_json(d));
    sets.push_back(ds);
  }
  j["disk_sets"] = sets;
  if (s.flags) {
    json fl = json::array();
    for (const auto& [c, f] : *s.flags)
      fl.push_back({{"chamber", c.value}, {"flag", flag_name(f)}});
    j["flags"] = fl;
  }
  if (s.policy) {
    std::vector<int> stab;
    for (const auto& [c, b] : s.policy->stabilized)
      if (b)
        stab.push_back(c.value);
    j["policy"] = {{"strategy", strategy_name(s.policy->strategy)}, {"stabilized", stab}};
  }
  if (s.profile) {
    json ev = json::array();
    for (const auto& e : s.profile->events) {
      json x{{"s", e.s}, {"kind", kind_name(e.kind)}, {"effect", effect_name(e.effect)}};
      if (e.curve)
        x["curve"] = e.curve->value;
      ev.push_back(x);
    }
    j["events"] = ev;
  }
  if (s.sphere)
    j["sphere"] = guide_json(*s.sphere);
  if (s.graphic) {
    json cols = json::array();
    for (const auto& col : s.graphic->regions) {
      json c = json::array();
      for (const auto& l : col)
        c.push_back(l.str());
      cols.push_back(c);
    }
    j["graphic"] = {{"annulus", s.graphic->annulus}, {"regions", cols}};
  }
  if (s.bullseye) {
    const auto& b = *s.bullseye;
    const auto& a = b.torus_side;
    j["bullseye"] = {{"host", b.host.value},
                     {"k", b.k},
                     {"blank", b.blank},
                     {"torus_side",
                      {{"ball", tri_name(a.is_ball)},
                       {"handlebody", tri_name(a.is_handlebody)},
                       {"solid_torus", tri_name(a.is_solid_torus)},
                       {"reducible", tri_name(a.is_reducible)}}},
                     {"torus_side_flag", flag_name(b.torus_side_flag)}};
  }
  return j.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  only_keys(j, "root", {"ambient_mode", "components", "chambers", "incidence", "disk_sets", "flags", "policy",
                        "events", "sphere", "graphic", "bullseye"});
  Scenario s;
  const auto mode = parse_mode(as_string(need(j, "root", "ambient_mode"), "ambient_mode"));
  if (!mode)
    bad("ambient_mode", "expected sphere or annotated");
  s.complex.mode = *mode;

  for (const auto& c : as_array(need(j, "root", "components"), "components")) {
    only_keys(c, "component", {"id", "pieces", "curves"});
    SurfaceComponent comp;
    comp.id = ComponentId{as_int(need(c, "component", "id"), "component.id")};
    const auto w = fmt::format("component {}", comp.id.value);
    for (const auto& p : as_array(need(c, w, "pieces"), w)) {
      only_keys(p, w + " piece", {"id", "genus", "slots"});
      comp.cut.pieces.push_back(
          Piece{PieceId{as_int(need(p, w, "id"), w)}, as_int(need(p, w, "genus"), w), as_int(need(p, w, "slots"), w)});
    }
    for (const auto& k : as_array(need(c, w, "curves"), w)) {
      only_keys(k, w + " curve", {"id", "a", "b"});
      comp.cut.curves.push_back(Curve{CurveId{as_int(need(k, w, "id"), w)}, parse_slot(need(k, w, "a"), w),
                                      parse_slot(need(k, w, "b"), w)});
    }
    comp.genus = component_genus(comp.cut);
    s.complex.components.push_back(std::move(comp));
  }
  for (const auto& c : as_array(need(j, "root", "chambers"), "chambers")) {
    only_keys(c, "chamber", {"id", "boundary", "annotation", "punctures"});
    Chamber ch;
    ch.id = ChamberId{as_int(need(c, "chamber", "id"), "chamber.id")};
    const auto w = fmt::format("chamber {}", ch.id.value);
    for (const auto& b : as_array(need(c, w, "boundary"), w))
      ch.boundary.push_back(ComponentId{as_int(b, w)});
    if (c.contains("annotation")) {
      const auto& a = c.at("annotation");
      only_keys(a, w + " annotation", {"ball", "handlebody", "solid_torus", "reducible"});
      if (a.contains("ball"))
        ch.annotation.is_ball = parse_tri(a.at("ball"), w);
      if (a.contains("handlebody"))
        ch.annotation.is_handlebody = parse_tri(a.at("handlebody"), w);
      if (a.contains("solid_torus"))
        ch.annotation.is_solid_torus = parse_tri(a.at("solid_torus"), w);
      if (a.contains("reducible"))
        ch.annotation.is_reducible = parse_tri(a.at("reducible"), w);
    }
    if (c.contains("punctures"))
      for (const auto& g : as_array(c.at("punctures"), w)) {
        std::vector<ComponentId> group;
        for (const auto& x : as_array(g, w))
          group.push_back(ComponentId{as_int(x, w)});
        ch.punctures.push_back(std::move(group));
      }
    s.complex.chambers.push_back(std::move(ch));
  }
  for (const auto& i : as_array(need(j, "root", "incidence"), "incidence")) {
    only_keys(i, "incidence", {"component", "sides"});
    const auto& sides = need(i, "incidence", "sides");
    if (!sides.is_array() || sides.size() != 2)
      bad("incidence", "sides is a pair of chambers");
    s.complex.incidence.push_back(Incidence{ComponentId{as_int(need(i, "incidence", "component"), "incidence")},
                                            ChamberId{as_int(sides[0], "incidence")},
                                            ChamberId{as_int(sides[1], "incidence")}});
  }
  if (j.contains("disk_sets"))
    for (const auto& set : as_array(j.at("disk_sets"), "disk_sets")) {
      DiskSet ds;
      for (const auto& d : as_array(set, "disk_sets"))
        ds.push_back(parse_disk(d, "disk"));
      s.disk_sets.push_back(std::move(ds));
    }
  if (j.contains("flags")) {
    FlagMap fm;
    for (const auto& f : as_array(j.at("flags"), "flags")) {
      only_keys(f, "flags", {"chamber", "flag"});
      const auto name = as_string(need(f, "flags", "flag"), "flags");
      if (name != "empty" && name != "occupied")
        bad("flags", fmt::format("\"{}\" is not empty/occupied", name));
      if (!fm.emplace(ChamberId{as_int(need(f, "flags", "chamber"), "flags")},
                      name == "empty" ? Flag::Empty : Flag::Occupied)
               .second)
        bad("flags", "a chamber is flagged twice");
    }
    s.flags = std::move(fm);
  }
  if (j.contains("policy")) {
    const auto& p = j.at("policy");
    only_keys(p, "policy", {"strategy", "stabilized"});
    SuccessionPolicy pol;
    if (p.contains("strategy")) {
      auto st = parse_strategy(as_string(p.at("strategy"), "policy"));
      if (!st)
        bad("policy", "unknown strategy");
      pol.strategy = *st;
    }
    if (p.contains("stabilized"))
      for (const auto& c : as_array(p.at("stabilized"), "policy"))
        pol.stabilized[ChamberId{as_int(c, "policy")}] = true;
    s.policy = std::move(pol);
  }
  if (j.contains("events")) {
    LevelProfile prof;
    for (const auto& e : as_array(j.at("events"), "events")) {
      only_keys(e, "event", {"s", "kind", "effect", "curve"});
      LevelEvent ev;
      ev.s = as_int64(need(e, "event", "s"), "event");
      const auto kind = as_string(need(e, "event", "kind"), "event");
      if (kind == "birth")
        ev.kind = EventKind::Birth;
      else if (kind == "death")
        ev.kind = EventKind::Death;
      else if (kind == "saddle")
        ev.kind = EventKind::Saddle;
      else
        bad("event", fmt::format("unknown kind \"{}\"", kind));
      const auto effect = e.contains("effect") ? as_string(e.at("effect"), "event") : std::string("none");
      if (effect == "above")
        ev.effect = DigitEffect::Above;
      else if (effect == "below")
        ev.effect = DigitEffect::Below;
      else if (effect != "none")
        bad("event", fmt::format("unknown effect \"{}\"", effect));
      if (e.contains("curve"))
        ev.curve = CurveId{as_int(e.at("curve"), "event")};
      prof.events.push_back(ev);
    }
    s.profile = std::move(prof);
  }
  if (j.contains("sphere"))
    s.sphere = parse_guide(j.at("sphere"));
  if (j.contains("graphic")) {
    const auto& g = j.at("graphic");
    only_keys(g, "graphic", {"annulus", "regions"});
    Graphic gr;
    if (g.contains("annulus")) {
      if (!g.at("annulus").is_boolean())
        bad("graphic", "annulus is a boolean");
      gr.annulus = g.at("annulus").get<bool>();
    }
    for (const auto& col : as_array(need(g, "graphic", "regions"), "graphic")) {
      std::vector<Label> c;
      for (const auto& x : as_array(col, "graphic")) {
        auto l = parse_label(as_string(x, "graphic"));
        if (!l)
          bad("graphic", "labels are two binary digits");
        c.push_back(*l);
      }
      gr.regions.push_back(std::move(c));
    }
    s.graphic = std::move(gr);
  }
  if (j.contains("bullseye")) {
    const auto& b = j.at("bullseye");
    only_keys(b, "bullseye", {"host", "k", "blank", "torus_side", "torus_side_flag"});
    Bullseye be;
    be.host = ChamberId{as_int(need(b, "bullseye", "host"), "bullseye")};
    be.k = as_int(need(b, "bullseye", "k"), "bullseye");
    if (be.k < 0)
      bad("bullseye", "k is negative");
    if (b.contains("blank")) {
      if (!b.at("blank").is_boolean())
        bad("bullseye", "blank is a boolean");
      be.blank = b.at("blank").get<bool>();
    }
    if (b.contains("torus_side")) {
      const auto& a = b.at("torus_side");
      only_keys(a, "bullseye torus_side", {"ball", "handlebody", "solid_torus", "reducible"});
      be.torus_side.is_ball = parse_tri(need(a, "bullseye torus_side", "ball"), "bullseye torus_side");
      be.torus_side.is_handlebody = parse_tri(need(a, "bullseye torus_side", "handlebody"), "bullseye torus_side");
      be.torus_side.is_solid_torus = parse_tri(need(a, "bullseye torus_side", "solid_torus"), "bullseye torus_side");
      be.torus_side.is_reducible = parse_tri(need(a, "bullseye torus_side", "reducible"), "bullseye torus_side");
    }
    if (b.contains("torus_side_flag")) {
      const auto f = as_string(b.at("torus_side_flag"), "bullseye");
      if (f != "empty" && f != "occupied")
        bad("bullseye", "torus_side_flag is empty or occupied");
      be.torus_side_flag = f == "empty" ? Flag::Empty : Flag::Occupied;
    }
    s.bullseye = be;
  }
  canonicalize(s);
  return s;
}

Scenario read_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw InputError(fmt::format("cannot read {}", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void write_text_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path);
  if (!out)
    throw InputError(fmt::format("cannot write {}", path));
  out << text;
}

FlaggedComplex flagged_of(const Scenario& s)
{
  FlaggedComplex f{s.complex, {}};
  for (const auto& ch : s.complex.chambers)
    f.flags[ch.id] = Flag::Occupied;
  if (s.flags)
    for (const auto& [c, x] : *s.flags)
      f.flags[c] = x;
  return f;
}

ValidationReport validate_full(const Scenario& s)
{
  if (s.bullseye) {
    auto r = validate_scenario(s.complex, {}, s.flags);
    if (!r.ok())
      return r;
    if (!s.complex.find_chamber(s.bullseye->host)) {
      r.issues.push_back({"dangling-reference", fmt::format("bullseye host {} is not a chamber", s.bullseye->host.value)});
      return r;
    }
    try {
      const auto inserted = insert_bullseye(flagged_of(s), *s.bullseye);
      return validate_scenario(inserted.complex.complex, s.disk_sets, inserted.complex.flags);
    } catch (const InputError& e) {
      r.issues.push_back({"bullseye-invalid", e.what()});
      return r;
    }
  }
  auto r = validate_scenario(s.complex, s.disk_sets, s.flags);
  auto add = [&](const ValidationReport& x) { r.issues.insert(r.issues.end(), x.issues.begin(), x.issues.end()); };
  if (s.profile)
    add(validate_profile(*s.profile));
  if (s.sphere)
    add(validate_guide(s.complex, *s.sphere));
  if (s.graphic)
    add(validate_graphic(*s.graphic));
  return r;
}

}  // namespace chamber
