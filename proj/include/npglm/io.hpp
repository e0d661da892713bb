#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "npglm/evaluation.hpp"
#include "npglm/hetnet.hpp"
#include "npglm/model.hpp"
#include "npglm/synthetic.hpp"

namespace npglm::io {

inline constexpr int kModelFormatVersion = 1;

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

// Writes `content` to a sibling temp file, then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);
std::string ReadFile(const std::filesystem::path& path);

/// Dataset text: a header line `d=<dim>`, then one `t,y,x1,...,xd` row per
/// sample. Parse errors name the offending line.
std::string FormatDataset(const Dataset& dataset);
Dataset ParseDataset(std::string_view text, std::string_view source = "<input>");
Dataset ReadDataset(const std::filesystem::path& path);

nlohmann::json GroundTruthToJson(const SynthConfig& config, const SyntheticData& data);

nlohmann::json ModelToJson(const AnyModel& model);
AnyModel ModelFromJson(const nlohmann::json& doc);
AnyModel ReadModel(const std::filesystem::path& path);

// {"node_types": [...], "relations": [["U", "follow", "U"], ...]}
HetSchema SchemaFromJson(const nlohmann::json& doc);
nlohmann::json SchemaToJson(const HetSchema& schema);

// One `src,relation,dst[,timestamp]` edge per line; '#' starts a comment.
void ParseEdges(std::string_view text, HetNet& net, std::string_view source = "<edges>");
std::string FormatEdges(const HetNet& net);

// One arrow-notation meta-path per line; '#' starts a comment.
std::vector<MetaPath> ParseMetaPaths(std::string_view text, const HetSchema& schema);

std::string FormatTable(const StudyTable& table, char delimiter = '\t');

// One row per model: mean and std of MAE, MRE and every interval accuracy.
std::string FormatReportTable(const EvalReport& report, char delimiter = '\t');
nlohmann::json ReportToJson(const EvalReport& report);

}  // namespace npglm::io
