#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "npglm/standardizer.hpp"
#include "npglm/survival.hpp"

namespace npglm {

using NodeId = std::uint32_t;
using Timestamp = std::int64_t;

struct RelationType {
  std::string src_type;
  std::string label;
  std::string dst_type;
};

/// Declared node types and relation triples. Relation labels are unique.
class HetSchema {
 public:
  HetSchema() = default;
  HetSchema(std::vector<std::string> node_types, std::vector<RelationType> relations);

  const std::vector<std::string>& node_types() const noexcept { return node_types_; }
  const std::vector<RelationType>& relations() const noexcept { return relations_; }

  bool HasNodeType(std::string_view type) const;
  // Index of the relation with this label; throws kSchemaMismatch if absent.
  std::size_t RelationIndex(std::string_view label) const;

 private:
  std::vector<std::string> node_types_;
  std::vector<RelationType> relations_;
};

// User/Post/Word/Link/Time schema with follow, write, mention, include,
// contain and possess relations.
HetSchema WeiboSchema();

struct HetEdge {
  NodeId src = 0;
  NodeId dst = 0;
  std::size_t relation = 0;
  std::optional<Timestamp> timestamp;  // absent: part of the static graph
};

class HetSnapshot;

/// Typed nodes and timestamped typed edges. Node types follow from the
/// relation endpoints the first time a node is seen.
class HetNet {
 public:
  explicit HetNet(HetSchema schema) : schema_(std::move(schema)) {}

  const HetSchema& schema() const noexcept { return schema_; }
  std::size_t node_count() const noexcept { return names_.size(); }
  const std::vector<HetEdge>& edges() const noexcept { return edges_; }

  NodeId AddNode(std::string_view name, std::string_view type);
  void AddEdge(std::string_view src, std::string_view relation, std::string_view dst,
               std::optional<Timestamp> timestamp = std::nullopt);

  std::optional<NodeId> Find(std::string_view name) const;
  const std::string& Name(NodeId id) const { return names_.at(id); }
  const std::string& TypeOf(NodeId id) const { return schema_.node_types().at(types_.at(id)); }
  std::vector<NodeId> NodesOfType(std::string_view type) const;

  // Graph as visible at t0: static edges and edges stamped <= t0.
  HetSnapshot Snapshot(Timestamp t0) const;

 private:
  HetSchema schema_;
  std::vector<std::string> names_;
  std::vector<std::size_t> types_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<HetEdge> edges_;
};

/// Binary adjacency per relation in both directions, duplicate edges merged.
class HetSnapshot {
 public:
  HetSnapshot(const HetNet& net, Timestamp t0);

  const HetNet& net() const noexcept { return *net_; }
  Timestamp time() const noexcept { return t0_; }
  const std::vector<NodeId>& Neighbors(std::size_t relation, bool forward, NodeId node) const;

 private:
  const HetNet* net_;
  Timestamp t0_;
  // [relation][direction][node] -> sorted unique neighbors
  std::vector<std::vector<std::vector<std::vector<NodeId>>>> adjacency_;
};

struct MetaPathStep {
  std::size_t relation = 0;
  bool forward = true;
  std::string from_type;
  std::string to_type;
};

/// Typed walk pattern in arrow notation, e.g. "U>follow>U<follow<U":
/// ">rel>" follows an edge from src to dst, "<rel<" walks it backwards.
struct MetaPath {
  std::string text;
  std::vector<MetaPathStep> steps;

  const std::string& start_type() const { return steps.front().from_type; }
  const std::string& end_type() const { return steps.back().to_type; }

  static MetaPath Parse(std::string_view text, const HetSchema& schema);
};

// The six symmetric user-user meta-paths used as link features.
std::vector<std::string> WeiboMetaPaths();

/// Number of walks from `from` to `to` matching the path, counted by
/// propagating walk multiplicities one step at a time.
std::uint64_t PathCount(const HetSnapshot& snapshot, const MetaPath& path, NodeId from, NodeId to);

// Walk counts from `from` to every reachable end node.
std::unordered_map<NodeId, std::uint64_t> PathCountsFrom(const HetSnapshot& snapshot, const MetaPath& path,
                                                         NodeId from);

struct SnapshotWindow {
  Timestamp t0 = 0;
  Timestamp te = 0;
};

struct LabeledPair {
  bool operator==(const LabeledPair&) const = default;
  NodeId from = 0;
  NodeId to = 0;
  int y = 0;
  double t = 0.0;
};

/// Pairs whose first `target_relation` link forms inside (t0, te] become
/// observed samples with t = t_c - t0. `negative_count` pairs never linked up
/// to te are drawn uniformly without replacement and censored at te - t0.
/// Pairs already linked at t0 are dropped. Output is sorted by (from, to).
std::vector<LabeledPair> LabelSamples(const HetNet& net, const SnapshotWindow& window,
                                      std::string_view target_relation, std::size_t negative_count,
                                      std::uint64_t seed);

struct FeatureMatrix {
  Dataset dataset;            // normalized, time-sorted
  Eigen::MatrixXd raw;        // raw path counts, rows in input pair order
  Standardizer normalization;
  std::vector<std::string> dropped_paths;
};

/// One Path-Count feature per meta-path at the t0 snapshot, z-scored. The
/// normalization is fitted on these pairs unless `fitted` is supplied.
FeatureMatrix BuildFeatureMatrix(const HetNet& net, const SnapshotWindow& window,
                                 const std::vector<LabeledPair>& pairs, const std::vector<MetaPath>& paths,
                                 const Standardizer* fitted = nullptr);

struct HetNetSynthConfig {
  std::size_t users = 60;
  std::size_t posts = 120;
  std::size_t words = 40;
  std::size_t links = 10;
  std::size_t times = 24;
  double static_follow_prob = 0.05;
  double mention_prob = 0.2;
  std::size_t words_per_post = 3;
  Timestamp t0 = 0;
  Timestamp window = 32;
  std::uint64_t seed = 0;
};

/// Random Weibo-like network. Static edges carry no timestamp; new follow
/// links arrive after t0 at a rate growing with common-followee counts.
HetNet GenerateHetNet(const HetNetSynthConfig& config);

}  // namespace npglm
