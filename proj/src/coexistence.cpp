#include "coexistence.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace attrscope {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Correlation: return "correlation";
    case Measure::MutualInformation: return "mutual_information";
    case Measure::ConditionalEntropy: return "conditional_entropy";
  }
  return "?";
}

std::string_view to_string(Layout l) {
  switch (l) {
    case Layout::Act: return "ACT";
    case Layout::Prd: return "PRD";
    case Layout::Cross: return "cross";
  }
  return "?";
}

std::string_view to_string(RankBy r) {
  return r == RankBy::Number ? "number" : "corNum";
}

Measure parse_measure(std::string_view text) {
  if (text == "correlation" || text == "pearson") return Measure::Correlation;
  if (text == "mutual_information" || text == "mi") {
    return Measure::MutualInformation;
  }
  if (text == "conditional_entropy" || text == "entropy") {
    return Measure::ConditionalEntropy;
  }
  throw validation_error("invalid_measure",
                         "unknown measure '" + std::string(text) + "'");
}

Layout parse_layout(std::string_view text) {
  if (text == "ACT" || text == "act") return Layout::Act;
  if (text == "PRD" || text == "prd") return Layout::Prd;
  if (text == "cross") return Layout::Cross;
  throw validation_error("invalid_layout",
                         "unknown layout '" + std::string(text) + "'");
}

RankBy parse_rank_by(std::string_view text) {
  if (text == "number") return RankBy::Number;
  if (text == "corNum" || text == "cornum") return RankBy::CorNum;
  throw validation_error("invalid_rank_by",
                         "rankBy must be 'number' or 'corNum'");
}

JointCounts joint_counts(std::span<const std::uint8_t> x,
                         std::span<const std::uint8_t> y) {
  if (x.size() != y.size()) {
    throw validation_error("length_mismatch",
                           "indicator vectors differ in length");
  }
  JointCounts c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) {
      if (y[i]) ++c.n11; else ++c.n10;
    } else {
      if (y[i]) ++c.n01; else ++c.n00;
    }
  }
  return c;
}

JointCounts joint_counts(const Dataset& dataset,
                         std::span<const std::size_t> group,
                         std::size_t attr_x, std::size_t attr_y,
                         IndicatorSpace space_x, IndicatorSpace space_y) {
  if (group.empty()) {
    throw validation_error("empty_group", "group is empty");
  }
  const auto x = attribute_indicator(dataset, group, attr_x, space_x);
  const auto y = attribute_indicator(dataset, group, attr_y, space_y);
  return joint_counts(x, y);
}

std::optional<double> pearson(const JointCounts& c) {
  const double n = static_cast<double>(c.n());
  const double sx = static_cast<double>(c.x_ones());
  const double sy = static_cast<double>(c.y_ones());
  if (c.x_ones() == 0 || c.x_ones() == c.n() || c.y_ones() == 0 ||
      c.y_ones() == c.n()) {
    return std::nullopt;
  }
  // Sums of centered products reduce to integer counts over the 2x2 table.
  const double cov = n * static_cast<double>(c.n11) - sx * sy;
  const double vx = sx * (n - sx);
  const double vy = sy * (n - sy);
  const double r = cov / (std::sqrt(vx) * std::sqrt(vy));
  return std::clamp(r, -1.0, 1.0);
}

namespace {

// count/n * log2(count * scale)
double plogp_term(std::size_t count, double n, double ratio) {
  if (count == 0) return 0.0;
  return static_cast<double>(count) / n * std::log2(ratio);
}

}  // namespace

double entropy_x(const JointCounts& c) {
  const double n = static_cast<double>(c.n());
  if (c.n() == 0) return 0.0;
  const double ones = static_cast<double>(c.x_ones());
  const double zeros = n - ones;
  return -(plogp_term(c.x_ones(), n, ones / n) +
           plogp_term(c.n() - c.x_ones(), n, zeros / n));
}

double mutual_information(const JointCounts& c) {
  if (c.n() == 0) return 0.0;
  const double n = static_cast<double>(c.n());
  const double x1 = static_cast<double>(c.x_ones());
  const double x0 = n - x1;
  const double y1 = static_cast<double>(c.y_ones());
  const double y0 = n - y1;
  auto term = [&](std::size_t nxy, double nx, double ny) {
    return plogp_term(nxy, n, static_cast<double>(nxy) * n / (nx * ny));
  };
  const double mi = term(c.n11, x1, y1) + term(c.n10, x1, y0) +
                    term(c.n01, x0, y1) + term(c.n00, x0, y0);
  return std::max(mi, 0.0);
}

double conditional_entropy(const JointCounts& c) {
  if (c.n() == 0) return 0.0;
  const double n = static_cast<double>(c.n());
  const double y1 = static_cast<double>(c.y_ones());
  const double y0 = n - y1;
  auto term = [&](std::size_t nxy, double ny) {
    return plogp_term(nxy, n, static_cast<double>(nxy) / ny);
  };
  const double h = -(term(c.n11, y1) + term(c.n10, y0) + term(c.n01, y1) +
                     term(c.n00, y0));
  return std::max(h, 0.0);
}

namespace {

std::optional<double> evaluate(Measure m, const JointCounts& c) {
  switch (m) {
    case Measure::Correlation: return pearson(c);
    case Measure::MutualInformation: return mutual_information(c);
    case Measure::ConditionalEntropy: return conditional_entropy(c);
  }
  return std::nullopt;
}

}  // namespace

PairwiseMatrix pairwise_matrix(const Dataset& dataset,
                               std::span<const std::size_t> group,
                               Measure measure, Layout layout) {
  if (group.empty()) {
    throw validation_error("empty_group", "group is empty");
  }
  const std::size_t a = dataset.attribute_count();
  PairwiseMatrix m;
  m.measure = measure;
  m.layout = layout;
  m.size = a;
  m.values.assign(a * a, std::nullopt);

  std::vector<std::vector<std::uint8_t>> act(a), prd(a);
  for (std::size_t i = 0; i < a; ++i) {
    act[i] = attribute_indicator(dataset, group, i, IndicatorSpace::Act);
    prd[i] = attribute_indicator(dataset, group, i, IndicatorSpace::PrdDecision);
  }

  if (layout == Layout::Cross) {
    for (std::size_t i = 0; i < a; ++i) {
      m.values[i * a + i] = evaluate(measure, joint_counts(act[i], prd[i]));
    }
    return m;
  }
  const auto& ind = layout == Layout::Act ? act : prd;
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < a; ++j) {
      m.values[i * a + j] = evaluate(measure, joint_counts(ind[i], ind[j]));
    }
  }
  return m;
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool contains_all(const Bits& set, const Bits& subset) {
  for (std::size_t w = 0; w < subset.size(); ++w) {
    if ((set[w] & subset[w]) != subset[w]) return false;
  }
  return true;
}

Bits to_bits(std::span<const std::uint8_t> flags, std::size_t words) {
  Bits b(words, 0);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) b[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return b;
}

}  // namespace

std::vector<CoexistenceRow> coexistence_table(
    const Dataset& dataset, std::span<const std::size_t> group, std::size_t k,
    RankBy rank_by, std::size_t limit) {
  if (k < kMinCombination || k > kMaxCombination) {
    throw validation_error("invalid_k", "combination size k must lie in [" +
                                            std::to_string(kMinCombination) +
                                            ", " +
                                            std::to_string(kMaxCombination) +
                                            "]");
  }
  const std::size_t a = dataset.attribute_count();
  if (k > a) return {};
  const std::size_t words = (a + 63) / 64;

  std::vector<Bits> act_bits, dec_bits;
  act_bits.reserve(group.size());
  dec_bits.reserve(group.size());
  for (auto idx : group) {
    const auto& r = dataset.record(idx);
    act_bits.push_back(to_bits(r.act, words));
    dec_bits.push_back(to_bits(decide(r.prd), words));
  }

  std::vector<CoexistenceRow> rows;
  std::vector<std::size_t> combo(k);
  for (std::size_t i = 0; i < k; ++i) combo[i] = i;
  while (true) {
    Bits mask(words, 0);
    for (auto c : combo) mask[c / 64] |= std::uint64_t{1} << (c % 64);
    CoexistenceRow row;
    for (std::size_t g = 0; g < act_bits.size(); ++g) {
      if (!contains_all(act_bits[g], mask)) continue;
      ++row.number;
      if (contains_all(dec_bits[g], mask)) ++row.cor_num;
    }
    if (row.number > 0) {
      row.combination = combo;
      rows.push_back(std::move(row));
    }
    // next combination in lexicographic order
    std::size_t pos = k;
    while (pos > 0 && combo[pos - 1] == a - k + (pos - 1)) --pos;
    if (pos == 0) break;
    ++combo[pos - 1];
    for (std::size_t i = pos; i < k; ++i) combo[i] = combo[i - 1] + 1;
  }

  // Rows are generated in lexicographic order; a stable sort keeps that as
  // the tie-break.
  std::stable_sort(rows.begin(), rows.end(),
                   [rank_by](const CoexistenceRow& l, const CoexistenceRow& r) {
                     return rank_by == RankBy::Number ? l.number > r.number
                                                      : l.cor_num > r.cor_num;
                   });
  if (limit > 0 && rows.size() > limit) rows.resize(limit);
  return rows;
}

}  // namespace attrscope
