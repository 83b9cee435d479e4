#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace laxkit::expr {

using AtomId = std::uint32_t;

/// Name of the dependent variable of the linearized equation.
inline constexpr std::string_view kLinearVar = "v";

enum class AtomKind : std::uint8_t { Parameter, Independent, Jet, Unknown };

/// Interned description of an indeterminate.
///
/// Unknown functions carry their argument list (x, t and jet atoms). A formal
/// partial derivative is an Unknown atom with a non-empty `wrt` multi-index,
/// kept in canonical atom order so that mixed partials commute.
struct AtomInfo {
  AtomKind kind{};
  std::string name;
  int order = 0;
  std::vector<AtomId> args;
  std::vector<AtomId> wrt;

  bool operator==(const AtomInfo&) const = default;

  bool is_jet_of(std::string_view depvar) const { return kind == AtomKind::Jet && name == depvar; }
  bool is_v_jet() const { return is_jet_of(kLinearVar); }
  bool is_unknown_function() const { return kind == AtomKind::Unknown && wrt.empty(); }
  bool is_formal_partial() const { return kind == AtomKind::Unknown && !wrt.empty(); }
};

AtomId parameter(std::string_view name);
AtomId independent_x();
AtomId independent_t();
AtomId jet(std::string_view depvar, int order);
AtomId unknown_function(std::string_view name, std::vector<AtomId> args);

/// Partial derivative of an unknown function (or of one of its partials) with
/// respect to one of its arguments; empty when the function does not depend on it.
std::optional<AtomId> formal_partial(AtomId fn, AtomId var);

/// The undifferentiated function an unknown-function atom or formal partial belongs to.
AtomId base_function(AtomId fn);

const AtomInfo& info(AtomId id);

/// Canonical atom order: parameters < x < t < jets of non-linear variables
/// (by name, then order) < v-jets by order < unknown functions < formal partials.
int compare_atoms(AtomId a, AtomId b);

inline bool atom_less(AtomId a, AtomId b) { return compare_atoms(a, b) < 0; }

}  // namespace laxkit::expr
