#include "fixtures.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rng.hpp"

namespace fixtures {

using attrscope::Dataset;
using attrscope::ImageRecord;
using attrscope::PointSet;
using attrscope::Rng;

std::vector<std::string> xray_attributes() {
  return {"BCC",
          "Beam off image",
          "Circular beamstop",
          "Diffuse low-q",
          "Diffuse high-q",
          "FCC",
          "Halo",
          "High background",
          "Higher order",
          "Linear beamstop",
          "Many rings",
          "Polycrystalline",
          "Ring",
          "Strong scattering",
          "Structure factor",
          "Weak scattering",
          "Wedge beamstop"};
}

std::string image_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img%04zu", i);
  return buf;
}

Dataset make_dataset(const std::vector<std::string>& names,
                     const std::vector<std::vector<int>>& act,
                     std::vector<std::vector<double>> prd,
                     std::vector<std::vector<double>> fea,
                     const std::string& name) {
  std::vector<ImageRecord> records;
  records.reserve(act.size());
  for (std::size_t i = 0; i < act.size(); ++i) {
    ImageRecord r;
    r.id = image_id(i);
    for (int v : act[i]) r.act.push_back(static_cast<std::uint8_t>(v));
    if (prd.empty()) {
      for (int v : act[i]) r.prd.push_back(v ? 0.9 : 0.1);
    } else {
      r.prd = prd[i];
    }
    if (fea.empty()) {
      r.fea = {static_cast<double>(i), static_cast<double>(i % 7)};
    } else {
      r.fea = fea[i];
    }
    records.push_back(std::move(r));
  }
  return Dataset(name, attrscope::AttributeCatalog(names), std::move(records));
}

namespace {

// Random labels and predictions that agree most of the time.
void fill_random(Rng& rng, std::vector<int>& act, std::vector<double>& prd) {
  for (std::size_t a = 0; a < act.size(); ++a) {
    act[a] = rng.uniform() < 0.3 ? 1 : 0;
    const bool agree = rng.uniform() < 0.8;
    const bool positive = agree ? act[a] == 1 : act[a] == 0;
    prd[a] = positive ? 0.5 + 0.49 * rng.uniform() : 0.49 * rng.uniform();
  }
}

}  // namespace

Dataset bcc_failure_dataset() {
  const auto names = xray_attributes();
  Rng rng(247);
  std::vector<std::vector<int>> act;
  std::vector<std::vector<double>> prd;
  for (std::size_t i = 0; i < 300; ++i) {
    std::vector<int> a(names.size());
    std::vector<double> p(names.size());
    fill_random(rng, a, p);
    if (i < kBccSelection) {
      // 200 missed BCC labels, 47 spurious BCC predictions.
      a[kBcc] = i < 200 ? 1 : 0;
      p[kBcc] = i < 200 ? 0.2 : 0.7;
      a[kFcc] = 0;
      p[kFcc] = 0.05;
    }
    act.push_back(std::move(a));
    prd.push_back(std::move(p));
  }
  return make_dataset(names, act, prd, {}, "bcc-failure");
}

Dataset rings_dataset() {
  const auto names = xray_attributes();
  struct Block {
    int count;
    int mr, ring, ss;  // 1 = predicted positive (correct)
  };
  const Block blocks[] = {{34, 1, 1, 1}, {5, 0, 0, 0}, {6, 0, 1, 1},
                          {3, 1, 1, 0},  {4, 0, 1, 0}, {2, 1, 0, 1}};
  Rng rng(54);
  std::vector<std::vector<int>> act;
  std::vector<std::vector<double>> prd;
  auto next = [&] {
    std::vector<int> a(names.size());
    std::vector<double> p(names.size());
    fill_random(rng, a, p);
    act.push_back(std::move(a));
    prd.push_back(std::move(p));
  };
  auto pick = [&](int predicted) {
    return predicted ? 0.6 + 0.3 * rng.uniform() : 0.4 * rng.uniform();
  };
  // Universe members are interleaved with other images.
  std::size_t block = 0;
  int left = blocks[0].count;
  for (std::size_t i = 0; i < 300; ++i) {
    next();
    auto& a = act.back();
    auto& p = prd.back();
    if (i % 5 == 0 && block < std::size(blocks)) {
      const auto& b = blocks[block];
      a[kManyRings] = a[kRing] = a[kStrongScattering] = 1;
      p[kManyRings] = pick(b.mr);
      p[kRing] = pick(b.ring);
      p[kStrongScattering] = pick(b.ss);
      if (--left == 0 && ++block < std::size(blocks)) left = blocks[block].count;
    } else if (a[kManyRings] && a[kRing] && a[kStrongScattering]) {
      a[kRing] = 0;
    }
  }
  if (block != std::size(blocks)) throw std::logic_error("rings fixture too small");
  return make_dataset(names, act, prd, {}, "rings");
}

Dataset random_dataset(std::uint64_t seed, std::size_t images,
                       std::size_t attributes, std::size_t features,
                       const std::string& name) {
  Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t a = 0; a < attributes; ++a) {
    names.push_back("attr" + std::to_string(a));
  }
  // Each attribute owns a random direction in feature space.
  std::vector<double> directions(attributes * features);
  for (auto& d : directions) d = rng.normal();
  std::vector<std::vector<int>> act;
  std::vector<std::vector<double>> prd, fea;
  for (std::size_t i = 0; i < images; ++i) {
    std::vector<int> a(attributes);
    std::vector<double> p(attributes);
    fill_random(rng, a, p);
    // Light correlation between neighbouring attributes.
    for (std::size_t k = 1; k < attributes; ++k) {
      if (a[k - 1] && rng.uniform() < 0.4) a[k] = 1;
    }
    std::vector<double> f(features);
    for (std::size_t d = 0; d < features; ++d) {
      double v = 0.3 * rng.normal();
      for (std::size_t k = 0; k < attributes; ++k) {
        if (a[k]) v += directions[k * features + d];
      }
      f[d] = v;
    }
    act.push_back(std::move(a));
    prd.push_back(std::move(p));
    fea.push_back(std::move(f));
  }
  return make_dataset(names, act, prd, fea, name);
}

LabelledPoints two_gaussians(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  LabelledPoints out{PointSet(200, dim), std::vector<int>(200)};
  for (std::size_t i = 0; i < 200; ++i) {
    const int label = i < 100 ? 0 : 1;
    out.labels[i] = label;
    for (std::size_t d = 0; d < dim; ++d) {
      out.points(i, d) = rng.normal() + (label == 1 && d == 0 ? 8.0 : 0.0);
    }
  }
  return out;
}

PointSet uniform_points(std::uint64_t seed, std::size_t n, std::size_t dim,
                        double scale) {
  Rng rng(seed);
  PointSet out(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) out(i, d) = scale * rng.uniform();
  }
  return out;
}

PointSet blob_points(std::uint64_t seed, std::size_t n, std::size_t dim) {
  Rng rng(seed);
  const std::size_t centres = 2 + rng.below(4);
  std::vector<double> c(centres * dim);
  for (auto& v : c) v = 10.0 * rng.uniform();
  PointSet out(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.15) {
      for (std::size_t d = 0; d < dim; ++d) out(i, d) = 10.0 * rng.uniform();
      continue;
    }
    const auto k = rng.below(centres);
    const double spread = 0.3 + 0.5 * rng.uniform();
    for (std::size_t d = 0; d < dim; ++d) {
      out(i, d) = c[k * dim + d] + spread * rng.normal();
    }
  }
  return out;
}

PointSet grouped_points(std::uint64_t seed, std::size_t groups,
                        std::size_t per_group) {
  Rng rng(seed);
  std::vector<std::array<double, 2>> centres;
  while (centres.size() < groups) {
    const std::array<double, 2> c{10.0 * rng.uniform(), 10.0 * rng.uniform()};
    bool apart = true;
    for (const auto& o : centres) {
      apart = apart && std::hypot(c[0] - o[0], c[1] - o[1]) >= 4.0;
    }
    if (apart) centres.push_back(c);
  }
  PointSet out(groups * per_group, 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& c = centres[i / per_group];
    out(i, 0) = c[0] + 0.5 * rng.normal();
    out(i, 1) = c[1] + 0.5 * rng.normal();
  }
  return out;
}

}  // namespace fixtures
