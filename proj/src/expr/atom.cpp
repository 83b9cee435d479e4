#include "laxkit/expr/atom.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "laxkit/errors.hpp"

namespace laxkit::expr {
namespace {

struct AtomInfoHash {
  std::size_t operator()(const AtomInfo& a) const noexcept {
    std::size_t h = std::hash<std::string>{}(a.name);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::size_t>(a.kind));
    mix(static_cast<std::size_t>(a.order));
    for (AtomId id : a.args) mix(id);
    mix(0xabcdefULL);
    for (AtomId id : a.wrt) mix(id);
    return h;
  }
};

// Append-only table. Entries live in a deque, so references handed out by
// info() stay valid while other threads intern new atoms.
class AtomTable {
public:
  AtomId intern(AtomInfo atom) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(atom); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(atom); it != index_.end()) return it->second;
    const auto id = static_cast<AtomId>(atoms_.size());
    atoms_.push_back(atom);
    index_.emplace(std::move(atom), id);
    return id;
  }

  const AtomInfo& get(AtomId id) const {
    std::shared_lock lock(mutex_);
    if (id >= atoms_.size()) throw std::out_of_range("atom id out of range");
    return atoms_[id];
  }

private:
  mutable std::shared_mutex mutex_;
  std::deque<AtomInfo> atoms_;
  std::unordered_map<AtomInfo, AtomId, AtomInfoHash> index_;
};

AtomTable& table() {
  static AtomTable instance;
  return instance;
}

int rank(const AtomInfo& a) {
  switch (a.kind) {
    case AtomKind::Parameter: return 0;
    case AtomKind::Independent: return 1;
    case AtomKind::Jet: return a.is_v_jet() ? 3 : 2;
    case AtomKind::Unknown: return a.wrt.empty() ? 4 : 5;
  }
  return 6;
}

int compare_lists(const std::vector<AtomId>& a, const std::vector<AtomId>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_atoms(a[i], b[i]); c != 0) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

}  // namespace

AtomId parameter(std::string_view name) {
  return table().intern(AtomInfo{AtomKind::Parameter, std::string(name), 0, {}, {}});
}

AtomId independent_x() {
  static const AtomId id = table().intern(AtomInfo{AtomKind::Independent, "x", 0, {}, {}});
  return id;
}

AtomId independent_t() {
  static const AtomId id = table().intern(AtomInfo{AtomKind::Independent, "t", 0, {}, {}});
  return id;
}

AtomId jet(std::string_view depvar, int order) {
  if (order < 0) throw std::invalid_argument("jet order must be nonnegative");
  return table().intern(AtomInfo{AtomKind::Jet, std::string(depvar), order, {}, {}});
}

AtomId unknown_function(std::string_view name, std::vector<AtomId> args) {
  std::sort(args.begin(), args.end(), atom_less);
  args.erase(std::unique(args.begin(), args.end()), args.end());
  for (AtomId a : args) {
    const auto& ai = info(a);
    if (ai.kind != AtomKind::Independent && ai.kind != AtomKind::Jet) {
      throw UnsupportedExpression("unknown-function arguments must be x, t or jet variables");
    }
  }
  return table().intern(AtomInfo{AtomKind::Unknown, std::string(name), 0, std::move(args), {}});
}

std::optional<AtomId> formal_partial(AtomId fn, AtomId var) {
  AtomInfo a = info(fn);
  if (a.kind != AtomKind::Unknown) throw std::invalid_argument("formal_partial of a non-function atom");
  if (std::find(a.args.begin(), a.args.end(), var) == a.args.end()) return std::nullopt;
  a.wrt.push_back(var);
  std::sort(a.wrt.begin(), a.wrt.end(), atom_less);
  return table().intern(std::move(a));
}

AtomId base_function(AtomId fn) {
  AtomInfo a = info(fn);
  if (a.kind != AtomKind::Unknown) throw std::invalid_argument("base_function of a non-function atom");
  if (a.wrt.empty()) return fn;
  a.wrt.clear();
  return table().intern(std::move(a));
}

const AtomInfo& info(AtomId id) { return table().get(id); }

int compare_atoms(AtomId a, AtomId b) {
  if (a == b) return 0;
  const AtomInfo& x = info(a);
  const AtomInfo& y = info(b);
  const int rx = rank(x), ry = rank(y);
  if (rx != ry) return rx < ry ? -1 : 1;
  switch (x.kind) {
    case AtomKind::Parameter:
      return x.name < y.name ? -1 : (x.name > y.name ? 1 : 0);
    case AtomKind::Independent:
      // x precedes t
      return x.name == "x" ? -1 : 1;
    case AtomKind::Jet:
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      return x.order < y.order ? -1 : (x.order > y.order ? 1 : 0);
    case AtomKind::Unknown: {
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      if (int c = compare_lists(x.args, y.args); c != 0) return c;
      if (x.wrt.size() != y.wrt.size()) return x.wrt.size() < y.wrt.size() ? -1 : 1;
      return compare_lists(x.wrt, y.wrt);
    }
  }
  return 0;
}

}  // namespace laxkit::expr
