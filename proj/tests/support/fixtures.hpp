#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "points.hpp"

namespace fixtures {

// The 17 attribute names of the x-ray scattering catalog.
std::vector<std::string> xray_attributes();

inline constexpr std::size_t kBcc = 0;
inline constexpr std::size_t kCircularBeamstop = 2;
inline constexpr std::size_t kFcc = 5;
inline constexpr std::size_t kLinearBeamstop = 9;
inline constexpr std::size_t kManyRings = 10;
inline constexpr std::size_t kRing = 12;
inline constexpr std::size_t kStrongScattering = 13;
inline constexpr std::size_t kWedgeBeamstop = 16;

std::string image_id(std::size_t i);

// Rows are per image. prd may be empty, in which case it mirrors act
// (1 -> 0.9, 0 -> 0.1). fea may be empty, in which case a 2-d feature
// derived from the index is used.
attrscope::Dataset make_dataset(const std::vector<std::string>& names,
                                const std::vector<std::vector<int>>& act,
                                std::vector<std::vector<double>> prd = {},
                                std::vector<std::vector<double>> fea = {},
                                const std::string& name = "fixture");

// 300 images; the first 247 form the selection whose BCC predictions are all
// wrong (both FN and FP occur) and whose FCC predictions are all true
// negatives.
attrscope::Dataset bcc_failure_dataset();
inline constexpr std::size_t kBccSelection = 247;

// 300 images. Exactly 54 carry Many rings, Ring and Strong scattering;
// predictions over those 54 produce fixed correctness patterns
// (flags for Many rings, Ring, Strong scattering):
//   34 x 111, 5 x 000, 6 x 011, 3 x 110, 4 x 010, 2 x 101.
attrscope::Dataset rings_dataset();

// Pseudo-random dataset with correlated attributes and features.
attrscope::Dataset random_dataset(std::uint64_t seed, std::size_t images,
                                  std::size_t attributes, std::size_t features,
                                  const std::string& name = "synthetic");

struct LabelledPoints {
  attrscope::PointSet points;
  std::vector<int> labels;
};

// Two isotropic Gaussian blobs (100 points each) in `dim` dimensions.
LabelledPoints two_gaussians(std::uint64_t seed, std::size_t dim = 10);

attrscope::PointSet uniform_points(std::uint64_t seed, std::size_t n,
                                   std::size_t dim, double scale = 1.0);

// Points drawn around a few random centres plus uniform background noise.
attrscope::PointSet blob_points(std::uint64_t seed, std::size_t n,
                                std::size_t dim);

// `groups` Gaussian groups of `per_group` points (sd 0.5) whose centres lie
// in [0, 10]^2 at least 4 apart.
attrscope::PointSet grouped_points(std::uint64_t seed, std::size_t groups = 3,
                                   std::size_t per_group = 4);

}  // namespace fixtures
