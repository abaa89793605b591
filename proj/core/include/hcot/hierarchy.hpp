#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcot/types.hpp"

namespace hcot {

/// Index sets used by the hierarchical complement entropy for one sample
/// with ground truth `g`. `{g}`, `inner` and `outer` partition the fine
/// label set; both lists are sorted ascending.
struct HierarchySlices {
  Index g = 0;
  std::vector<Index> inner;  ///< siblings of g (its coarse group minus g)
  std::vector<Index> outer;  ///< fine classes outside g's coarse group
};

/// Two-level label taxonomy: a partition of `num_fine` classes into
/// `num_coarse` non-empty groups. Immutable once constructed.
class LabelHierarchy {
 public:
  /// Builds from a fine -> coarse map. Coarse ids must be contiguous from 0
  /// and every group non-empty; throws std::invalid_argument otherwise.
  explicit LabelHierarchy(std::vector<Index> fine_to_coarse);

  /// All fine classes in a single group.
  static LabelHierarchy flat(Index num_fine);
  /// Every fine class is its own group.
  static LabelHierarchy identity(Index num_fine);
  /// Consecutive runs of num_fine / num_coarse fine classes share a group.
  /// Requires num_coarse to divide num_fine.
  static LabelHierarchy contiguous(Index num_fine, Index num_coarse);

  Index num_fine() const noexcept { return fine_to_coarse_.size(); }
  Index num_coarse() const noexcept { return coarse_members_.size(); }

  /// Throws std::out_of_range for an invalid fine index.
  Index coarse_of(Index fine) const;
  /// Sorted fine members of a coarse group.
  std::span<const Index> members(Index coarse) const;
  std::span<const Index> fine_to_coarse() const noexcept { return fine_to_coarse_; }

  /// Throws std::out_of_range unless g < num_fine().
  HierarchySlices slices_for(Index g) const;

  bool operator==(const LabelHierarchy& other) const noexcept {
    return fine_to_coarse_ == other.fine_to_coarse_;
  }

 private:
  std::vector<Index> fine_to_coarse_;
  std::vector<std::vector<Index>> coarse_members_;
};

/// Hierarchy file syntax error, carrying the 1-based offending line
/// (0 when the problem concerns the file as a whole).
class HierarchyParseError : public std::runtime_error {
 public:
  HierarchyParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parses the `<fine_index> <coarse_index>` text format. Blank lines and
/// lines starting with '#' are ignored; a '#' after the two fields starts a
/// trailing comment.
LabelHierarchy parse_hierarchy(std::string_view text);

/// Reads and parses a hierarchy file. Throws std::runtime_error when the
/// file cannot be opened.
LabelHierarchy load_hierarchy(const std::filesystem::path& path);

/// Canonical text form; parse_hierarchy(serialize_hierarchy(h)) == h.
std::string serialize_hierarchy(const LabelHierarchy& h);

}  // namespace hcot
