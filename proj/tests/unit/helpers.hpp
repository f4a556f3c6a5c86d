#pragma once

#include <random>

#include "chamber/builders.hpp"
#include "chamber/fuzz.hpp"
#include "chamber/oracles.hpp"

namespace testing_support {

using namespace chamber;

// Two chambers split by one closed surface of the given genus.
inline ChamberComplex closed_scene(int genus)
{
  ChamberComplex cx;
  cx.components.push_back(closed_component(ComponentId{0}, PieceId{0}, genus));
  cx.chambers = {Chamber{ChamberId{0}, {ComponentId{0}}, {}, {}}, Chamber{ChamberId{1}, {ComponentId{0}}, {}, {}}};
  cx.incidence = {Incidence{ComponentId{0}, ChamberId{0}, ChamberId{1}}};
  return cx;
}

inline FlagMap all_occupied(const ChamberComplex& cx)
{
  FlagMap f;
  for (const auto& c : cx.chambers)
    f[c.id] = Flag::Occupied;
  return f;
}

}  // namespace testing_support
