#pragma once

#include <optional>
#include <string>

#include "chamber/sweepout.hpp"

// Brute-force reference computations used by the fuzz campaigns and tests.
// None of them calls the engine routine it is checking.
namespace chamber::oracle {

// Connected classes of pieces found by breadth-first search over curves,
// with genus read off the Euler characteristic of each class.
struct SurfaceCensus {
  int euler = 0;
  std::vector<std::vector<PieceId>> classes;  // sorted pieces of each class
  std::vector<int> genera;                    // parallel to classes
};

SurfaceCensus census(const ChamberComplex& complex);

// chi(F_D) = chi(F) + 2|D| and every surgered component's genus agrees with
// the census. Returns a description of the first discrepancy.
std::optional<std::string> check_euler(const ChamberComplex& before, const DiskSet& disks, const RawComplex& raw);

// Every side the engine calls disky has no untouched original component and
// only genus-0 surfaces inside it, each internal disk has scars on two
// components, and every sphere inside it bounds a disky side of its own.
std::optional<std::string> check_disky(const RawComplex& raw);

// The six consistency rules read literally, plus the rule that only known
// non-ball handlebodies may be empty.
struct RuleVerdict {
  std::array<bool, 6> rules{true, true, true, true, true, true};
  bool flags_valid = true;
  bool consistent() const;
};

RuleVerdict six_rules(const SplitView& view);

// Labels and circle counts of the four quadrants, recomputed from Euler
// characteristics of blocks joined by bands.
struct QuadrantTruth {
  std::array<Label, 4> labels;
  std::array<int, 4> circles{};
};

QuadrantTruth quadrants(const QuadrantConfig& config);

// Column scan and interval adjacency for a monotone graphic.
struct BandTruth {
  bool column_intervals = false;
  bool connected = false;
  bool essential_loop = false;
};

BandTruth band(const Graphic& graphic);

// Connectivity of sequences under the recorded witnesses, by union-find.
bool ledger_connected(const EquivalenceLedger& ledger, int a, int b);

}  // namespace chamber::oracle
