#include "hcot/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hcot {

LabelHierarchy::LabelHierarchy(std::vector<Index> fine_to_coarse)
    : fine_to_coarse_(std::move(fine_to_coarse)) {
  if (fine_to_coarse_.empty()) {
    throw std::invalid_argument("label hierarchy needs at least one fine class");
  }
  const Index num_coarse = *std::max_element(fine_to_coarse_.begin(), fine_to_coarse_.end()) + 1;
  coarse_members_.resize(num_coarse);
  for (Index fine = 0; fine < fine_to_coarse_.size(); ++fine) {
    coarse_members_[fine_to_coarse_[fine]].push_back(fine);
  }
  for (Index c = 0; c < num_coarse; ++c) {
    if (coarse_members_[c].empty()) {
      throw std::invalid_argument("coarse index " + std::to_string(c) +
                                  " has no members; coarse indices must be contiguous from 0");
    }
  }
}

LabelHierarchy LabelHierarchy::flat(Index num_fine) {
  return LabelHierarchy(std::vector<Index>(num_fine, 0));
}

LabelHierarchy LabelHierarchy::identity(Index num_fine) {
  std::vector<Index> map(num_fine);
  for (Index i = 0; i < num_fine; ++i) map[i] = i;
  return LabelHierarchy(std::move(map));
}

LabelHierarchy LabelHierarchy::contiguous(Index num_fine, Index num_coarse) {
  if (num_coarse == 0 || num_fine % num_coarse != 0) {
    throw std::invalid_argument("contiguous hierarchy: " + std::to_string(num_coarse) +
                                " groups do not divide " + std::to_string(num_fine) +
                                " fine classes");
  }
  const Index group = num_fine / num_coarse;
  std::vector<Index> map(num_fine);
  for (Index i = 0; i < num_fine; ++i) map[i] = i / group;
  return LabelHierarchy(std::move(map));
}

Index LabelHierarchy::coarse_of(Index fine) const {
  if (fine >= fine_to_coarse_.size()) {
    throw std::out_of_range("fine index " + std::to_string(fine) + " out of range [0, " +
                            std::to_string(fine_to_coarse_.size()) + ")");
  }
  return fine_to_coarse_[fine];
}

std::span<const Index> LabelHierarchy::members(Index coarse) const {
  if (coarse >= coarse_members_.size()) {
    throw std::out_of_range("coarse index " + std::to_string(coarse) + " out of range");
  }
  return coarse_members_[coarse];
}

HierarchySlices LabelHierarchy::slices_for(Index g) const {
  const Index group = coarse_of(g);
  HierarchySlices s;
  s.g = g;
  const auto& siblings = coarse_members_[group];
  s.inner.reserve(siblings.size() - 1);
  for (Index j : siblings) {
    if (j != g) s.inner.push_back(j);
  }
  s.outer.reserve(num_fine() - siblings.size());
  for (Index j = 0; j < num_fine(); ++j) {
    if (fine_to_coarse_[j] != group) s.outer.push_back(j);
  }
  return s;
}

HierarchyParseError::HierarchyParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? "hierarchy: " + what
                                   : "hierarchy line " + std::to_string(line) + ": " + what),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\v\f");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r\v\f", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r\v\f", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

Index parse_index(std::string_view field, std::size_t line, const char* what) {
  Index value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw HierarchyParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

LabelHierarchy parse_hierarchy(std::string_view text) {
  struct Entry {
    Index fine;
    Index coarse;
    std::size_t line;
  };
  std::vector<Entry> entries;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() > 2) {
      throw HierarchyParseError(line_no, "expected '<fine_index> <coarse_index>', got " +
                                             std::to_string(fields.size()) +
                                             " fields (only two-level hierarchies are supported)");
    }
    if (fields.size() < 2) {
      throw HierarchyParseError(line_no, "expected '<fine_index> <coarse_index>'");
    }
    entries.push_back({parse_index(fields[0], line_no, "fine index"),
                       parse_index(fields[1], line_no, "coarse index"), line_no});
  }

  if (entries.empty()) throw HierarchyParseError(0, "empty file (no fine-class lines)");

  const Index num_fine = entries.size();
  std::vector<Index> map(num_fine);
  std::vector<std::size_t> seen_at(num_fine, 0);
  for (const auto& e : entries) {
    if (e.fine >= num_fine) {
      throw HierarchyParseError(e.line, "fine index " + std::to_string(e.fine) +
                                            " out of range [0, " + std::to_string(num_fine) + ")");
    }
    if (seen_at[e.fine] != 0) {
      throw HierarchyParseError(e.line, "duplicate fine index " + std::to_string(e.fine) +
                                            " (first seen on line " +
                                            std::to_string(seen_at[e.fine]) + ")");
    }
    seen_at[e.fine] = e.line;
    map[e.fine] = e.coarse;
  }

  // Coarse ids must form 0..C-1. Report the first line using an id past a gap.
  std::vector<bool> used;
  for (const auto& e : entries) {
    if (e.coarse >= used.size()) used.resize(e.coarse + 1, false);
    used[e.coarse] = true;
  }
  const auto gap = std::find(used.begin(), used.end(), false);
  if (gap != used.end()) {
    const Index missing = static_cast<Index>(gap - used.begin());
    for (const auto& e : entries) {
      if (e.coarse > missing) {
        throw HierarchyParseError(e.line, "non-contiguous coarse index " +
                                              std::to_string(e.coarse) + " (coarse index " +
                                              std::to_string(missing) + " is never used)");
      }
    }
  }
  return LabelHierarchy(std::move(map));
}

LabelHierarchy load_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open hierarchy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hierarchy(buf.str());
}

std::string serialize_hierarchy(const LabelHierarchy& h) {
  std::string out = "# fine_index coarse_index\n";
  for (Index fine = 0; fine < h.num_fine(); ++fine) {
    out += std::to_string(fine);
    out += ' ';
    out += std::to_string(h.coarse_of(fine));
    out += '\n';
  }
  return out;
}

}  // namespace hcot
