#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "laxkit/verification/verification.hpp"

namespace laxkit::corpus {

struct ManifoldEntry {
  std::string id;
  std::string description;
  std::string document;  // manifold file text
  int p = 0;
  int s = 0;  // -1 when the coefficients depend on no jets
  verification::Status expected = verification::Status::Verified;
  bool expect_no_spectral_parameter = false;
  std::vector<std::string> notes;
};

struct RelatedForm {
  std::string name;
  std::string equation;  // "u_t = ..."
  std::string relation;
};

struct CorpusEntry {
  std::string id;
  std::string name;
  std::string equation;  // "u_t = ..."
  std::vector<ManifoldEntry> manifolds;
  /// Transcriptions kept for reference that are expected to fail verification.
  std::vector<ManifoldEntry> variants;
  std::vector<RelatedForm> related;
  std::vector<std::string> notes;
};

const std::vector<CorpusEntry>& entries();
/// Throws std::out_of_range for an unknown id.
const CorpusEntry& entry(std::string_view id);
const ManifoldEntry& manifold_entry(std::string_view entry_id, std::string_view manifold_id);

jet::EvolutionEquation equation(const CorpusEntry& e);
manifold::LinearManifold build(const ManifoldEntry& m);

struct EntrySummary {
  std::string id;
  std::string name;
  int order = 0;
  std::size_t manifolds = 0;
};
std::vector<EntrySummary> list();

struct ItemResult {
  std::string entry;
  std::string manifold;
  verification::Status expected = verification::Status::Verified;
  std::vector<verification::VerificationReport> reports;  // invariant manifold, symmetry, Lax pair
  std::vector<std::string> parameters;
  bool metadata_ok = true;
  bool passed = false;
  std::vector<std::string> problems;
};

ItemResult run_item(const CorpusEntry& e, const ManifoldEntry& m);
/// Every manifold of every entry (variants too when asked), checked concurrently.
std::vector<ItemResult> run_all(bool include_variants = false);

nlohmann::json to_json(const ItemResult& r);
/// All manifolds of an entry in the manifold file format, one document per manifold.
std::vector<std::pair<std::string, std::string>> export_entry(const CorpusEntry& e, bool include_variants = false);

}  // namespace laxkit::corpus
