#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dataset.hpp"

namespace attrscope {

// 2x2 contingency table of two binary indicators. n11 counts x=1,y=1;
// n10 counts x=1,y=0; and so on.
struct JointCounts {
  std::size_t n11 = 0;
  std::size_t n10 = 0;
  std::size_t n01 = 0;
  std::size_t n00 = 0;

  std::size_t n() const noexcept { return n11 + n10 + n01 + n00; }
  std::size_t x_ones() const noexcept { return n11 + n10; }
  std::size_t y_ones() const noexcept { return n11 + n01; }
  /// Same table with the roles of X and Y exchanged.
  JointCounts swapped() const noexcept { return {n11, n01, n10, n00}; }
  bool operator==(const JointCounts&) const = default;
};

enum class Measure { Correlation, MutualInformation, ConditionalEntropy };
enum class Layout { Act, Prd, Cross };
enum class RankBy { Number, CorNum };

std::string_view to_string(Measure m);
std::string_view to_string(Layout l);
std::string_view to_string(RankBy r);
Measure parse_measure(std::string_view text);
Layout parse_layout(std::string_view text);
RankBy parse_rank_by(std::string_view text);

JointCounts joint_counts(std::span<const std::uint8_t> x,
                         std::span<const std::uint8_t> y);

JointCounts joint_counts(const Dataset& dataset,
                         std::span<const std::size_t> group,
                         std::size_t attr_x, std::size_t attr_y,
                         IndicatorSpace space_x, IndicatorSpace space_y);

/// Pearson correlation of the two indicators. nullopt when either indicator
/// is constant over the table.
std::optional<double> pearson(const JointCounts& counts);

/// Entropy of X in bits.
double entropy_x(const JointCounts& counts);

/// I(X;Y) in bits, with 0 log 0 = 0.
double mutual_information(const JointCounts& counts);

/// H(X|Y) in bits: -sum p(x,y) log2(p(x,y) / p(y)).
///
/// The printed form of this measure in the source material divides by p(x),
/// which would not be a conditional entropy of X given Y. The standard form
/// is used so that H(X) - H(X|Y) == I(X;Y) holds.
double conditional_entropy(const JointCounts& counts);

struct PairwiseMatrix {
  Measure measure = Measure::Correlation;
  Layout layout = Layout::Act;
  std::size_t size = 0;
  // Row-major size x size. Rows are the uncertain attribute X, columns the
  // conditioning attribute Y. Cross layout fills the diagonal only.
  std::vector<std::optional<double>> values;

  const std::optional<double>& at(std::size_t row, std::size_t col) const {
    return values[row * size + col];
  }
};

PairwiseMatrix pairwise_matrix(const Dataset& dataset,
                               std::span<const std::size_t> group,
                               Measure measure, Layout layout);

struct CoexistenceRow {
  std::vector<std::size_t> combination;  // ascending attribute indices
  std::size_t number = 0;  // images whose ACT carries every attribute
  std::size_t cor_num = 0;  // of those, images predicted positive on all
  bool operator==(const CoexistenceRow&) const = default;
};

inline constexpr std::size_t kMinCombination = 2;
inline constexpr std::size_t kMaxCombination = 8;

/// All k-combinations with number > 0 over `group`, sorted descending by
/// `rank_by` with lexicographic ties; limit 0 means unlimited.
std::vector<CoexistenceRow> coexistence_table(
    const Dataset& dataset, std::span<const std::size_t> group, std::size_t k,
    RankBy rank_by, std::size_t limit);

}  // namespace attrscope
