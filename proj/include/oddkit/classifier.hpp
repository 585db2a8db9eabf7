// SPDX-License-Identifier: Apache-2.0
//
// Data categories and kinds relative to an ODD allocation chain.
//
// A point gets exactly one category relative to one node, decided in order:
//   1. Inlier   - provenance shows the declared preprocessing does not
//                 reproduce the values, and the point is inside the node;
//   2. Novelty  - inside the node and the MLM, but outside the extended
//                 node once hidden parameter values are added;
//   3. geometry - with k parameters at an admissible extreme:
//                 inside & k=0 Nominal, inside & k=1 EdgeCase,
//                 inside & k>=2 FeasibleCornerCase,
//                 outside & k>=2 InfeasibleCornerCase, otherwise Outlier.
// Boundary points count as inside.
//
// Kinds partition every point: InS/OutS inside the MLM ODD (sampled or
// not), OutMOD inside the MLC ODD only, OutCOD outside the MLC ODD, so
// InMOD = InS + OutS and InCOD = InMOD + OutMOD.
#pragma once

#include "oddkit/dsl.hpp"
#include "oddkit/model.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oddkit {

enum class CategoryLabel {
  Nominal,
  EdgeCase,
  FeasibleCornerCase,
  InfeasibleCornerCase,
  Outlier,
  Inlier,
  Novelty,
};

inline constexpr CategoryLabel kAllCategories[] = {
    CategoryLabel::Nominal,      CategoryLabel::EdgeCase, CategoryLabel::FeasibleCornerCase,
    CategoryLabel::InfeasibleCornerCase, CategoryLabel::Outlier, CategoryLabel::Inlier,
    CategoryLabel::Novelty,
};

struct Category {
  CategoryLabel label = CategoryLabel::Nominal;
  [[nodiscard]] bool anomaly() const {
    return label == CategoryLabel::Inlier || label == CategoryLabel::Outlier ||
           label == CategoryLabel::InfeasibleCornerCase || label == CategoryLabel::Novelty;
  }
  friend bool operator==(const Category&, const Category&) = default;
};

enum class Kind { InS, OutS, OutMOD, OutCOD };

/// Row labels of the partition tables: the kind together with its
/// enclosing derived set.
enum class KindSet { InMOD_InS, InMOD_OutS, InCOD_OutMOD, OutCOD };

inline constexpr KindSet kAllKindSets[] = {KindSet::InMOD_InS, KindSet::InMOD_OutS,
                                           KindSet::InCOD_OutMOD, KindSet::OutCOD};

KindSet kind_set(Kind k);

std::string_view to_string(CategoryLabel c);
std::string_view to_string(Kind k);
std::string_view to_string(KindSet k);  // "InMOD/InS", "InMOD/OutS", "InCOD/OutMOD", "OutCOD"
bool parse_enum(std::string_view text, CategoryLabel& out);
bool parse_enum(std::string_view text, Kind& out);
bool parse_enum(std::string_view text, KindSet& out);

struct PartitionKey {
  KindSet kinds = KindSet::InMOD_InS;
  CategoryLabel category = CategoryLabel::Nominal;
  friend auto operator<=>(const PartitionKey&, const PartitionKey&) = default;
};

std::string to_string(const PartitionKey& key);

class MissingTransform : public Error {
 public:
  MissingTransform(const std::string& parameter, const std::string& node)
      : Error("provenance for '" + parameter + "' but node '" + node +
              "' declares no preprocessing for it") {}
};

class ChainError : public Error {
 public:
  using Error::Error;
};

/// Points used during MLM learning, matched within a normalized tolerance.
class SampleRegistry {
 public:
  SampleRegistry() = default;
  SampleRegistry(const OddNode& mlm, const std::vector<DataPoint>& points, Tolerance tol);

  [[nodiscard]] bool matches(const DataPoint& p) const;
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const std::vector<Eigen::VectorXd>& normalized_points() const { return points_; }

 private:
  std::vector<Eigen::VectorXd> points_;  // sorted by first coordinate
  std::vector<std::string> names_;
  Eigen::VectorXd lo_, span_;
  double tol_ = 1e-9;
};

struct Chain {
  OddNode mlm;
  OddNode mlc;
  std::optional<OddNode> mlc_operated;
  std::optional<OddNode> extended;
  std::optional<OddNode> system_od;  // sub-annotation source for OutCOD rows
  SampleRegistry registry;
};

struct ChainNames {
  std::string mlm;
  std::string mlc;
  std::optional<std::string> mlc_operated;
  std::optional<std::string> extended;
};

/// Resolves a chain in `doc`, checking that the MLM allocates (transitively)
/// to the MLC and that `extended` extends the MLM. The registry collects
/// the rows of `samples` flagged in_sample. Throws ChainError.
Chain make_chain(const SpecDocument& doc, const ChainNames& names,
                 const std::vector<DataPoint>& samples = {});

struct CategoryDetail {
  Category category;
  Containment containment = Containment::outside;
  std::vector<std::string> extremes;
};

CategoryDetail classify_detail(const DataPoint& p, const OddNode& node, const Chain* context,
                               Tolerance tol);
Category classify_category(const DataPoint& p, const OddNode& node, const Chain* context,
                           Tolerance tol);
Category classify_category(const DataPoint& p, const OddNode& node);

Kind classify_kind(const DataPoint& p, const Chain& chain, Tolerance tol);

/// One row of the label output: category judged against the MLM for InMOD
/// kinds and against the MLC otherwise.
struct RowLabel {
  std::size_t row = 0;
  Kind kind = Kind::OutS;
  Category category;
  std::string node;
  bool on_boundary = false;
  std::string annotations;  // `key=value;...`
  [[nodiscard]] PartitionKey key() const;
};

std::vector<RowLabel> label_rows(const Dataset& ds, const Chain& chain, Tolerance tol);

/// Label CSV: row,kind,category,node,on_boundary,annotations
std::string write_labels(const std::vector<RowLabel>& labels);

using PartitionMap = std::map<PartitionKey, std::vector<std::size_t>>;

/// OutCOD rows collapse into a single (OutCOD, Outlier) bucket; their
/// system-OD category survives as an annotation in label_rows.
PartitionMap partition_dataset(const Dataset& ds, const Chain& chain, Tolerance tol);
PartitionMap partition_from_labels(const std::vector<RowLabel>& labels);

struct KindClaim {
  std::size_t row = 0;
  std::string kind;  // unparsed, so audits can flag garbage
};

/// Reads the row and kind columns of a label CSV.
std::vector<KindClaim> read_kind_claims(std::string_view labels_csv);

struct SetAlgebraViolation {
  std::size_t row = 0;
  std::string identity;
  friend bool operator==(const SetAlgebraViolation&, const SetAlgebraViolation&) = default;
};

struct SetAlgebraReport {
  bool holds = true;
  std::vector<SetAlgebraViolation> violations;
};

/// Recomputes kind membership from labels (claimed, or classify_kind when
/// none are given) and from direct geometric membership, then checks
/// totality, disjointness, InMOD = InS + OutS, InCOD = InMOD + OutMOD and
/// that InS rows are registry samples.
SetAlgebraReport verify_set_algebra(const Dataset& ds, const Chain& chain, Tolerance tol,
                                    const std::vector<KindClaim>* claims = nullptr);

}  // namespace oddkit
