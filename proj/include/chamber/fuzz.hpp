#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "chamber/io.hpp"

namespace chamber {

struct FuzzBounds {
  int max_components = 4;
  int max_genus = 3;
  int max_disks = 4;
  int max_sequence = 4;
};

struct FuzzConfig {
  std::uint64_t seed = 0;
  FuzzBounds bounds;
  std::string property = "validate";
  std::size_t samples = 100;
  AmbientMode mode = AmbientMode::Sphere;
  Strategy policy = Strategy::Default;
  unsigned threads = 0;  // 0: hardware concurrency, capped by CHAMBER_CALCULUS_THREADS
};

// Independent stream for one sample of a campaign.
std::mt19937_64 instance_rng(std::uint64_t seed, std::size_t index);

// Random building blocks. Everything they return passes validation.
ChamberComplex random_complex(std::mt19937_64& rng, const FuzzBounds& bounds, AmbientMode mode, bool annotate);
// Occupied everywhere except some known non-ball handlebodies; retried until not tiny when asked.
FlagMap random_flags(const ChamberComplex& complex, std::mt19937_64& rng, bool non_tiny);
DiskSet random_disk_set(const ChamberComplex& complex, std::mt19937_64& rng, int max_disks);
Graphic random_graphic(std::mt19937_64& rng, int max_columns, int max_rows, bool annulus);

// A sphere-guided start: a level sphere crossing the surfaces, its profile
// and a balanced label at the sphere's level.
struct GuidedInstance {
  FlaggedComplex start;
  LevelProfile profile;
  GuideSphere guide;
};
GuidedInstance random_guided_instance(std::mt19937_64& rng, const FuzzBounds& bounds);

// A base complex with disks, plus a bullseye and disks meeting it.
struct BullseyeInstance {
  FlaggedComplex base;
  DiskSet disks;
  Bullseye bullseye;
};
BullseyeInstance random_bullseye_instance(std::mt19937_64& rng, const FuzzBounds& bounds);

// A chain of complexes C_1, C'_1, C_2, ..., C'_n, C_{n+1} in which each
// neighbouring pair issues one common certificate and no other pair does.
struct ScriptedCycle {
  EquivalenceLedger ledger;
  std::vector<int> primary;    // ids of C_1 .. C_{n+1}
  std::vector<int> secondary;  // ids of C'_1 .. C'_n
};
ScriptedCycle scripted_cycle(int n);

// Deterministic per (config.seed, index); throws InputError when the bounds
// admit no scene.
Scenario generate_instance(const FuzzConfig& config, std::size_t index);

struct PropertyResult {
  bool pass = true;
  std::string detail;
  std::optional<Scenario> counterexample;
};

const std::vector<std::string>& property_names();
bool known_property(const std::string& name);

// Generates sample `index` for the property and checks it.
PropertyResult check_sample(const FuzzConfig& config, std::size_t index);
// Re-checks a serialized counterexample of a scenario-based property.
PropertyResult replay(const std::string& property, const Scenario& scenario, const FuzzConfig& config = {});

struct FuzzReport {
  std::string property;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure;
  std::string detail;
  std::optional<Scenario> counterexample;
  double seconds = 0;
};

unsigned worker_count(const FuzzConfig& config);
FuzzReport run_fuzz(const FuzzConfig& config);

}  // namespace chamber
