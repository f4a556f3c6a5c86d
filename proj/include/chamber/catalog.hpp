#pragma once

#include "chamber/certificates.hpp"

namespace chamber {

// A small add-a-disk configuration: decompose `base` along `disks`, then add `extra`.
struct AddDiskCase {
  std::string name;
  FlaggedComplex base;
  DiskSet disks;
  DiskAttachment extra;
};

// Every configuration with at most `max_components` surfaces drawn from spheres,
// tori and genus-2 surfaces with a separating curve, with solid-torus flag
// variants on leaf chambers, at most one disk in the set and one extra disk.
std::vector<AddDiskCase> add_disk_catalog(int max_components = 3);

}  // namespace chamber
