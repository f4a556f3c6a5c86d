#include "chamber/catalog.hpp"

#include <fmt/format.h>

#include "chamber/builders.hpp"

namespace chamber {

namespace {

enum class Kind { Sphere, Torus, Genus2 };

// Chamber trees on n + 1 chambers with chamber 0 as the root: parent[i] is the
// chamber on the far side of component i from chamber i + 1.
std::vector<std::vector<int>> trees(int n)
{
  std::vector<std::vector<int>> out;
  std::vector<int> parent(n, 0);
  while (true) {
    out.push_back(parent);
    int i = n - 1;
    while (i >= 0 && parent[i] == i)
      parent[i--] = 0;
    if (i < 0)
      break;
    ++parent[i];
  }
  return out;
}

struct Choice {
  std::vector<Kind> kinds;
  std::vector<int> parent;
  std::vector<int> leaf_flag;  // per chamber: 0 occupied, 1 occupied solid torus, 2 empty solid torus
};

// A meridian disk of a torus in a chamber otherwise bounded by spheres shows
// the chamber is a solid torus with those spheres as punctures. Returns false
// when the chamber has other positive-genus boundary, since that solid torus
// cannot be written down as an annotation.
bool record_meridian(FlaggedComplex& f, const DiskAttachment& d)
{
  const auto& comp = f.complex.component(d.component);
  if (comp.genus != 1 || classify_curve(comp, d.curve).kind != CurveKind::EssentialNonseparating)
    return true;
  auto& ch = f.complex.chamber(d.chamber);
  std::vector<std::vector<ComponentId>> punctures;
  for (auto b : ch.boundary) {
    if (b == d.component)
      continue;
    if (f.complex.component(b).genus != 0)
      return false;
    punctures.push_back({b});
  }
  ch.annotation = solid_torus_annotation();
  ch.punctures = std::move(punctures);
  return true;
}

}  // namespace

std::vector<AddDiskCase> add_disk_catalog(int max_components)
{
  std::vector<AddDiskCase> out;
  for (int n = 1; n <= max_components; ++n) {
    for (const auto& parent : trees(n)) {
      std::vector<int> kind_digits(n, 0);
      while (true) {
        std::vector<Kind> kinds;
        for (int d : kind_digits)
          kinds.push_back(static_cast<Kind>(d));
        // Chambers bounded by a single torus may carry a solid-torus reading.
        std::vector<int> torus_leaves;
        for (int c = 0; c <= n; ++c) {
          int degree = 0, comp = -1;
          for (int i = 0; i < n; ++i)
            if (parent[i] == c || i + 1 == c) {
              ++degree;
              comp = i;
            }
          if (degree == 1 && kinds[comp] == Kind::Torus)
            torus_leaves.push_back(c);
        }
        std::vector<int> flag_digits(torus_leaves.size(), 0);
        while (true) {
          SceneBuilder b;
          std::vector<ChamberId> ch;
          for (int c = 0; c <= n; ++c)
            ch.push_back(b.chamber());
          for (std::size_t t = 0; t < torus_leaves.size(); ++t) {
            const auto c = ch[torus_leaves[t]];
            if (flag_digits[t] >= 1)
              b.annotate(c, solid_torus_annotation());
            if (flag_digits[t] == 2)
              b.flag(c, Flag::Empty);
          }
          std::vector<BuiltSurface> surfaces;
          for (int i = 0; i < n; ++i) {
            const auto a = ch[parent[i]], c = ch[i + 1];
            switch (kinds[i]) {
              case Kind::Sphere: surfaces.push_back(b.sphere(a, c)); break;
              case Kind::Torus: surfaces.push_back(b.torus(a, c)); break;
              case Kind::Genus2: surfaces.push_back(b.surface(SurfaceShape{1, 0, 1, {1}}, a, c)); break;
            }
          }
          FlaggedComplex base;
          try {
            base = b.build();
          } catch (const InputError&) {
            base = {};
          }
          if (!base.complex.chambers.empty()) {
            // Curves and the two chambers beside each.
            struct Site {
              const BuiltSurface* s;
              CurveId curve;
              ChamberId side;
            };
            std::vector<Site> sites;
            for (int i = 0; i < n; ++i) {
              const auto& s = surfaces[i];
              std::vector<CurveId> curves = s.loops;
              curves.insert(curves.end(), s.caps.begin(), s.caps.end());
              curves.insert(curves.end(), s.separating.begin(), s.separating.end());
              for (auto k : curves)
                for (auto side : {ch[parent[i]], ch[i + 1]})
                  sites.push_back({&s, k, side});
            }
            const std::string stem = fmt::format("n{}-p{}-k{}-f{}", n, fmt::join(parent, ""), fmt::join(kind_digits, ""),
                                                 fmt::join(flag_digits, ""));
            // Everything else in the chamber stays on the body side of a disk, so
            // any two disks of one configuration agree on where surfaces sit.
            auto others = [&](ChamberId c, ComponentId own) {
              std::vector<PieceId> out;
              for (auto y : base.complex.chamber(c).boundary)
                if (y != own)
                  out.push_back(base.complex.component(y).cut.pieces.front().id);
              std::sort(out.begin(), out.end());
              return out;
            };
            // Each disk either pushes the rest of its chamber to the body side or
            // swallows it; pairs whose sides cross are not disjoint and are skipped.
            std::vector<DiskAttachment> options;
            for (const auto& site : sites)
              for (bool swallow : {false, true}) {
                const auto rest = others(site.side, site.s->id);
                DiskAttachment d{DiskId{0}, site.side, site.s->id, site.curve, std::nullopt,
                                 swallow ? std::vector<PieceId>{} : rest};
                if (swallow && (rest.empty() || !disk_side_a(base.complex, d)))
                  continue;
                options.push_back(d);
              }
            for (int di = -1; di < static_cast<int>(options.size()); ++di)
              for (std::size_t ei = 0; ei < options.size(); ++ei) {
                DiskSet disks;
                DiskAttachment e = options[ei];
                e.id = DiskId{1};
                if (di >= 0) {
                  if (options[di].curve == e.curve || disks_cross(base.complex, options[di], e))
                    continue;
                  disks.push_back(options[di]);
                }
                FlaggedComplex known = base;
                bool expressible = record_meridian(known, e);
                for (const auto& d : disks)
                  expressible = record_meridian(known, d) && expressible;
                if (!expressible || !validate_complex(known.complex).ok() || !validate_flags(known.complex, known.flags).ok() ||
                    !validate_disk_set(known.complex, disks).ok())
                  continue;
                out.push_back({fmt::format("{}-d{}-e{}", stem, di, ei), known, disks, e});
              }
          }
          std::size_t t = 0;
          while (t < flag_digits.size() && flag_digits[t] == 2)
            flag_digits[t++] = 0;
          if (t == flag_digits.size())
            break;
          ++flag_digits[t];
        }
        int i = 0;
        while (i < n && kind_digits[i] == 2)
          kind_digits[i++] = 0;
        if (i == n)
          break;
        ++kind_digits[i];
      }
    }
  }
  return out;
}

}  // namespace chamber
