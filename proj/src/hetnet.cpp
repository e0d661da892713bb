#include "npglm/hetnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_set>
#include <utility>

#include "npglm/error.hpp"
#include "npglm/random.hpp"

namespace npglm {

HetSchema::HetSchema(std::vector<std::string> node_types, std::vector<RelationType> relations)
    : node_types_(std::move(node_types)), relations_(std::move(relations)) {
  std::set<std::string> seen_types;
  for (const std::string& t : node_types_) {
    Require(!t.empty(), "node type names must be non-empty");
    Require(seen_types.insert(t).second, "duplicate node type '" + t + "'");
  }
  std::set<std::string> seen_labels;
  for (const RelationType& r : relations_) {
    Require(seen_labels.insert(r.label).second, "duplicate relation label '" + r.label + "'");
    if (!HasNodeType(r.src_type) || !HasNodeType(r.dst_type)) {
      throw Error(ErrorCode::kSchemaMismatch, "relation '" + r.label + "' uses an undeclared node type");
    }
  }
}

bool HetSchema::HasNodeType(std::string_view type) const {
  return std::find(node_types_.begin(), node_types_.end(), type) != node_types_.end();
}

std::size_t HetSchema::RelationIndex(std::string_view label) const {
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i].label == label) return i;
  }
  throw Error(ErrorCode::kSchemaMismatch, "relation '" + std::string(label) + "' is not in the schema");
}

HetSchema WeiboSchema() {
  return HetSchema({"U", "P", "W", "L", "T"}, {{"U", "follow", "U"},
                                               {"U", "write", "P"},
                                               {"P", "mention", "U"},
                                               {"P", "include", "L"},
                                               {"P", "contain", "W"},
                                               {"P", "possess", "T"}});
}

std::vector<std::string> WeiboMetaPaths() {
  return {
      "U>follow>U<follow<U",                    // common followee
      "U<follow<U>follow>U",                    // common follower
      "U>write>P>mention>U<mention<P<write<U",  // common mentioned user
      "U>write>P>contain>W<contain<P<write<U",  // common word in posts
      "U>write>P>include>L<include<P<write<U",  // common referenced URL
      "U>write>P>possess>T<possess<P<write<U",  // common posting time
  };
}

NodeId HetNet::AddNode(std::string_view name, std::string_view type) {
  const auto type_it = std::find(schema_.node_types().begin(), schema_.node_types().end(), type);
  if (type_it == schema_.node_types().end()) {
    throw Error(ErrorCode::kSchemaMismatch, "node type '" + std::string(type) + "' is not in the schema");
  }
  const auto type_index = static_cast<std::size_t>(type_it - schema_.node_types().begin());
  const std::string key(name);
  if (auto it = index_.find(key); it != index_.end()) {
    if (types_[it->second] != type_index) {
      throw Error(ErrorCode::kSchemaMismatch, "node '" + key + "' has type " + TypeOf(it->second) +
                                                  ", used as " + std::string(type));
    }
    return it->second;
  }
  const auto id = static_cast<NodeId>(names_.size());
  names_.push_back(key);
  types_.push_back(type_index);
  index_.emplace(key, id);
  return id;
}

void HetNet::AddEdge(std::string_view src, std::string_view relation, std::string_view dst,
                     std::optional<Timestamp> timestamp) {
  const std::size_t r = schema_.RelationIndex(relation);
  const RelationType& rel = schema_.relations()[r];
  const NodeId s = AddNode(src, rel.src_type);
  const NodeId d = AddNode(dst, rel.dst_type);
  edges_.push_back({s, d, r, timestamp});
}

std::optional<NodeId> HetNet::Find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::vector<NodeId> HetNet::NodesOfType(std::string_view type) const {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < names_.size(); ++id) {
    if (TypeOf(id) == type) out.push_back(id);
  }
  return out;
}

HetSnapshot HetNet::Snapshot(Timestamp t0) const { return HetSnapshot(*this, t0); }

HetSnapshot::HetSnapshot(const HetNet& net, Timestamp t0) : net_(&net), t0_(t0) {
  const std::size_t n = net.node_count();
  adjacency_.assign(net.schema().relations().size(),
                    std::vector<std::vector<std::vector<NodeId>>>(2, std::vector<std::vector<NodeId>>(n)));
  for (const HetEdge& e : net.edges()) {
    if (e.timestamp && *e.timestamp > t0) continue;
    adjacency_[e.relation][1][e.src].push_back(e.dst);
    adjacency_[e.relation][0][e.dst].push_back(e.src);
  }
  for (auto& by_direction : adjacency_) {
    for (auto& by_node : by_direction) {
      for (auto& list : by_node) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
      }
    }
  }
}

const std::vector<NodeId>& HetSnapshot::Neighbors(std::size_t relation, bool forward, NodeId node) const {
  return adjacency_.at(relation)[forward ? 1 : 0].at(node);
}

MetaPath MetaPath::Parse(std::string_view text, const HetSchema& schema) {
  // Tokens alternate node type, arrow, relation, arrow, node type, ...
  std::vector<std::string> names;
  std::vector<char> arrows;
  std::string current;
  for (char c : text) {
    if (c == '>' || c == '<') {
      names.push_back(current);
      arrows.push_back(c);
      current.clear();
    } else if (c != ' ') {
      current.push_back(c);
    }
  }
  names.push_back(current);
  const std::string source(text);
  if (arrows.size() < 2 || arrows.size() % 2 != 0) {
    throw Error(ErrorCode::kParse, "meta-path '" + source + "' is not of the form T>rel>T or T<rel<T");
  }

  MetaPath path;
  path.text = source;
  for (std::size_t k = 0; k + 1 < arrows.size(); k += 2) {
    if (arrows[k] != arrows[k + 1]) {
      throw Error(ErrorCode::kParse, "meta-path '" + source + "' mixes arrow directions around a relation");
    }
    MetaPathStep step;
    step.from_type = names[k];
    step.relation = schema.RelationIndex(names[k + 1]);
    step.forward = arrows[k] == '>';
    step.to_type = names[k + 2];
    const RelationType& rel = schema.relations()[step.relation];
    const std::string& expected_from = step.forward ? rel.src_type : rel.dst_type;
    const std::string& expected_to = step.forward ? rel.dst_type : rel.src_type;
    if (step.from_type != expected_from || step.to_type != expected_to) {
      throw Error(ErrorCode::kSchemaMismatch, "meta-path '" + source + "' step " + step.from_type +
                                                  (step.forward ? ">" : "<") + rel.label +
                                                  (step.forward ? ">" : "<") + step.to_type +
                                                  " does not match relation " + rel.src_type + "-" +
                                                  rel.label + "->" + rel.dst_type);
    }
    path.steps.push_back(std::move(step));
  }
  return path;
}

std::unordered_map<NodeId, std::uint64_t> PathCountsFrom(const HetSnapshot& snapshot, const MetaPath& path,
                                                         NodeId from) {
  const HetNet& net = snapshot.net();
  Require(!path.steps.empty(), "meta-path has no steps");
  if (net.TypeOf(from) != path.start_type()) {
    throw Error(ErrorCode::kSchemaMismatch, "node '" + net.Name(from) + "' has type " + net.TypeOf(from) +
                                                ", meta-path starts at " + path.start_type());
  }
  std::unordered_map<NodeId, std::uint64_t> frontier{{from, 1}};
  for (const MetaPathStep& step : path.steps) {
    std::unordered_map<NodeId, std::uint64_t> next;
    for (const auto& [node, walks] : frontier) {
      for (NodeId neighbor : snapshot.Neighbors(step.relation, step.forward, node)) next[neighbor] += walks;
    }
    frontier = std::move(next);
  }
  return frontier;
}

std::uint64_t PathCount(const HetSnapshot& snapshot, const MetaPath& path, NodeId from, NodeId to) {
  const HetNet& net = snapshot.net();
  if (net.TypeOf(to) != path.end_type()) {
    throw Error(ErrorCode::kSchemaMismatch, "node '" + net.Name(to) + "' has type " + net.TypeOf(to) +
                                                ", meta-path ends at " + path.end_type());
  }
  const auto counts = PathCountsFrom(snapshot, path, from);
  const auto it = counts.find(to);
  return it == counts.end() ? 0 : it->second;
}

std::vector<LabeledPair> LabelSamples(const HetNet& net, const SnapshotWindow& window,
                                      std::string_view target_relation, std::size_t negative_count,
                                      std::uint64_t seed) {
  Require(window.t0 < window.te, "snapshot window needs t0 < te");
  const std::size_t r = net.schema().RelationIndex(target_relation);
  const RelationType& rel = net.schema().relations()[r];

  // Earliest link time per pair; static edges count as linked before t0.
  std::map<std::pair<NodeId, NodeId>, Timestamp> first_link;
  constexpr Timestamp kStatic = std::numeric_limits<Timestamp>::min();
  for (const HetEdge& e : net.edges()) {
    if (e.relation != r || e.src == e.dst) continue;
    const Timestamp when = e.timestamp.value_or(kStatic);
    auto [it, inserted] = first_link.try_emplace({e.src, e.dst}, when);
    if (!inserted) it->second = std::min(it->second, when);
  }

  std::vector<LabeledPair> out;
  std::set<std::pair<NodeId, NodeId>> linked_by_end;
  for (const auto& [pair, when] : first_link) {
    if (when > window.te) continue;
    linked_by_end.insert(pair);
    if (when > window.t0) out.push_back({pair.first, pair.second, 1, static_cast<double>(when - window.t0)});
  }

  const std::vector<NodeId> sources = net.NodesOfType(rel.src_type);
  const std::vector<NodeId> targets = net.NodesOfType(rel.dst_type);
  const bool same_type = rel.src_type == rel.dst_type;
  const std::size_t total_pairs = sources.size() * targets.size() - (same_type ? sources.size() : 0);
  const std::size_t available = total_pairs - linked_by_end.size();
  if (negative_count > available) {
    throw Error(ErrorCode::kInsufficientNegatives, "requested " + std::to_string(negative_count) +
                                                       " never-linked pairs, only " + std::to_string(available) +
                                                       " exist");
  }

  const auto eligible = [&](NodeId a, NodeId b) { return a != b && !linked_by_end.contains({a, b}); };
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> negatives;
  if (2 * negative_count <= available) {
    std::uniform_int_distribution<std::size_t> pick_src(0, sources.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_dst(0, targets.size() - 1);
    std::set<std::pair<NodeId, NodeId>> chosen;
    while (chosen.size() < negative_count) {
      const NodeId a = sources[pick_src(rng)];
      const NodeId b = targets[pick_dst(rng)];
      if (eligible(a, b) && chosen.insert({a, b}).second) negatives.emplace_back(a, b);
    }
  } else {
    std::vector<std::pair<NodeId, NodeId>> all;
    all.reserve(available);
    for (NodeId a : sources) {
      for (NodeId b : targets) {
        if (eligible(a, b)) all.emplace_back(a, b);
      }
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(negative_count);
    negatives = std::move(all);
  }

  const double censored_time = static_cast<double>(window.te - window.t0);
  for (const auto& [a, b] : negatives) out.push_back({a, b, 0, censored_time});
  std::sort(out.begin(), out.end(), [](const LabeledPair& l, const LabeledPair& r) {
    return std::pair(l.from, l.to) < std::pair(r.from, r.to);
  });
  return out;
}

FeatureMatrix BuildFeatureMatrix(const HetNet& net, const SnapshotWindow& window,
                                 const std::vector<LabeledPair>& pairs, const std::vector<MetaPath>& paths,
                                 const Standardizer* fitted) {
  Require(!paths.empty(), "at least one meta-path is required");
  Require(!pairs.empty(), "no sample pairs to featurize");
  const HetSnapshot snapshot = net.Snapshot(window.t0);

  FeatureMatrix out;
  out.raw.resize(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(paths.size()));
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const MetaPath& path = paths[j];
    std::optional<NodeId> cached_source;
    std::unordered_map<NodeId, std::uint64_t> counts;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const LabeledPair& pair = pairs[i];
      if (net.TypeOf(pair.to) != path.end_type()) {
        throw Error(ErrorCode::kSchemaMismatch, "pair target '" + net.Name(pair.to) +
                                                    "' does not match the end type of " + path.text);
      }
      if (cached_source != pair.from) {
        counts = PathCountsFrom(snapshot, path, pair.from);
        cached_source = pair.from;
      }
      const auto it = counts.find(pair.to);
      out.raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          it == counts.end() ? 0.0 : static_cast<double>(it->second);
    }
  }

  out.normalization = fitted != nullptr ? *fitted : Standardizer::Fit(out.raw);
  Require(out.normalization.input_dim() == out.raw.cols(), "normalization does not match the meta-path count");
  for (Eigen::Index j : out.normalization.dropped()) out.dropped_paths.push_back(paths[static_cast<std::size_t>(j)].text);

  std::vector<Sample> samples;
  samples.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    samples.push_back({out.normalization.Apply(out.raw.row(static_cast<Eigen::Index>(i)).transpose()), pairs[i].y,
                       pairs[i].t});
  }
  out.dataset = Dataset(std::move(samples), out.normalization.output_dim());
  return out;
}

HetNet GenerateHetNet(const HetNetSynthConfig& config) {
  Require(config.users >= 2, "need at least two users");
  Require(config.window > 0, "window must be positive");
  Rng rng(config.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const auto name = [](char prefix, std::size_t i) { return std::string(1, prefix) + std::to_string(i); };

  HetNet net(WeiboSchema());
  for (std::size_t u = 0; u < config.users; ++u) net.AddNode(name('u', u), "U");

  std::vector<std::vector<bool>> follows(config.users, std::vector<bool>(config.users, false));
  for (std::size_t a = 0; a < config.users; ++a) {
    for (std::size_t b = 0; b < config.users; ++b) {
      if (a != b && uniform(rng) < config.static_follow_prob) {
        follows[a][b] = true;
        net.AddEdge(name('u', a), "follow", name('u', b));
      }
    }
  }
  for (std::size_t p = 0; p < config.posts; ++p) {
    const std::string post = name('p', p);
    net.AddEdge(name('u', pick(config.users)), "write", post);
    if (config.times > 0) net.AddEdge(post, "possess", name('t', pick(config.times)));
    for (std::size_t k = 0; k < config.words_per_post && config.words > 0; ++k) {
      net.AddEdge(post, "contain", name('w', pick(config.words)));
    }
    if (config.links > 0 && uniform(rng) < 0.3) net.AddEdge(post, "include", name('l', pick(config.links)));
    if (uniform(rng) < config.mention_prob) net.AddEdge(post, "mention", name('u', pick(config.users)));
  }

  // New follow links: exponential arrival with rate growing in common followees.
  const double base_rate = 0.002;
  for (std::size_t a = 0; a < config.users; ++a) {
    for (std::size_t b = 0; b < config.users; ++b) {
      if (a == b || follows[a][b]) continue;
      int common = 0;
      for (std::size_t c = 0; c < config.users; ++c) common += follows[a][c] && follows[b][c];
      const double rate = base_rate * std::exp(0.7 * common);
      const double arrival = -std::log1p(-uniform(rng)) / rate;
      const auto delay = static_cast<Timestamp>(std::ceil(arrival));
      if (delay <= 2 * config.window) {
        net.AddEdge(name('u', a), "follow", name('u', b), config.t0 + std::max<Timestamp>(delay, 1));
      }
    }
  }
  return net;
}

}  // namespace npglm
