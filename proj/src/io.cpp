#include "npglm/io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <system_error>

#include "npglm/error.hpp"

namespace npglm::io {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    fields.push_back(Trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

// Calls fn(line_number, content) for every non-blank, non-comment line.
template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (!line.empty()) fn(line_number, line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

[[noreturn]] void ParseFailure(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double ParseNumber(std::string_view field, std::string_view source, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    ParseFailure(source, line, "'" + std::string(field) + "' is not a finite number");
  }
  return value;
}

template <typename Int>
Int ParseInteger(std::string_view field, std::string_view source, std::size_t line) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    ParseFailure(source, line, "'" + std::string(field) + "' is not an integer");
  }
  return value;
}

json VectorToJson(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd VectorFromJson(const json& doc) {
  const auto values = doc.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json NormalizationToJson(const Standardizer& s) {
  if (s.identity()) return nullptr;
  return {{"mean", VectorToJson(s.mean())}, {"scale", VectorToJson(s.scale())}, {"kept", s.kept()}};
}

Standardizer NormalizationFromJson(const json& doc) {
  if (doc.is_null()) return {};
  return Standardizer(VectorFromJson(doc.at("mean")), VectorFromJson(doc.at("scale")),
                      doc.at("kept").get<std::vector<Eigen::Index>>());
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + temp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move " + temp.string() + " to " + path.string() + ": " + ec.message());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string FormatDataset(const Dataset& dataset) {
  std::string out = "d=" + std::to_string(dataset.dim()) + "\n";
  for (const Sample& s : dataset) {
    out += FormatDouble(s.t);
    out += ',';
    out += std::to_string(s.y);
    for (Eigen::Index j = 0; j < s.x.size(); ++j) {
      out += ',';
      out += FormatDouble(s.x[j]);
    }
    out += '\n';
  }
  return out;
}

Dataset ParseDataset(std::string_view text, std::string_view source) {
  std::optional<Eigen::Index> dim;
  std::vector<Sample> samples;
  ForEachLine(text, [&](std::size_t line, std::string_view content) {
    if (!dim) {
      if (!content.starts_with("d=")) ParseFailure(source, line, "expected header 'd=<dim>'");
      dim = ParseInteger<Eigen::Index>(Trim(content.substr(2)), source, line);
      if (*dim < 0) ParseFailure(source, line, "dimension must be non-negative");
      return;
    }
    const auto fields = SplitFields(content, ',');
    if (static_cast<Eigen::Index>(fields.size()) != *dim + 2) {
      ParseFailure(source, line, "expected " + std::to_string(*dim + 2) + " fields (t,y,x1..xd), found " +
                                     std::to_string(fields.size()));
    }
    Sample s;
    s.t = ParseNumber(fields[0], source, line);
    if (s.t < 0.0) ParseFailure(source, line, "time must be non-negative");
    s.y = ParseInteger<int>(fields[1], source, line);
    if (s.y != 0 && s.y != 1) ParseFailure(source, line, "y must be 0 or 1");
    s.x.resize(*dim);
    for (Eigen::Index j = 0; j < *dim; ++j) s.x[j] = ParseNumber(fields[static_cast<std::size_t>(j) + 2], source, line);
    samples.push_back(std::move(s));
  });
  if (!dim) throw Error(ErrorCode::kParse, std::string(source) + ": missing 'd=<dim>' header");
  return Dataset(std::move(samples), *dim);
}

Dataset ReadDataset(const std::filesystem::path& path) { return ParseDataset(ReadFile(path), path.string()); }

json GroundTruthToJson(const SynthConfig& config, const SyntheticData& data) {
  return {{"distribution", DistributionName(config.distribution)},
          {"dim", config.dim},
          {"n_observed", config.n_observed},
          {"n_censored", config.n_censored},
          {"seed", config.seed},
          {"w", VectorToJson(data.truth.w)},
          {"b", data.truth.b},
          {"drawn_times", data.drawn_times}};
}

json ModelToJson(const AnyModel& model) {
  json doc = {{"format", "npglm-model"}, {"version", kModelFormatVersion}};
  if (const auto* np = std::get_if<NpglmModel>(&model)) {
    doc["kind"] = "npglm";
    doc["link"] = np->link.Tag();
    doc["w"] = VectorToJson(np->w);
    doc["hazard"] = {{"knots", np->table.knots()}, {"values", np->table.values()}};
    doc["normalization"] = NormalizationToJson(np->normalization);
    doc["fit_report"] = {{"iterations", np->report.iterations},
                         {"converged", np->report.converged},
                         {"log_likelihood", np->report.log_likelihood},
                         {"w_change", np->report.w_change}};
  } else {
    const auto& p = std::get<ParametricModel>(model);
    doc["kind"] = "parametric";
    doc["family"] = FamilyTag(p.family);
    doc["link"] = "exp";
    doc["w"] = VectorToJson(p.w);
    doc["shape"] = p.shape ? json(*p.shape) : json(nullptr);
    // Rate at the zero feature vector; informational, ignored on load.
    doc["intercept_rate"] = p.w.size() > 0 ? std::exp(p.w[p.w.size() - 1]) : 1.0;
    doc["normalization"] = NormalizationToJson(p.normalization);
    doc["fit_report"] = {{"iterations", p.iterations}, {"log_likelihood", p.log_likelihood}};
  }
  return doc;
}

AnyModel ModelFromJson(const json& doc) {
  try {
    if (doc.at("format") != "npglm-model") throw Error(ErrorCode::kParse, "not an npglm model document");
    const int version = doc.at("version").get<int>();
    if (version > kModelFormatVersion) {
      throw Error(ErrorCode::kParse, "model format version " + std::to_string(version) + " is newer than supported");
    }
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "npglm") {
      NpglmModel m;
      m.link = LinkFunction::FromTag(doc.at("link").get<std::string>());
      m.w = VectorFromJson(doc.at("w"));
      const auto knots = doc.at("hazard").at("knots").get<std::vector<double>>();
      const auto values = doc.at("hazard").at("values").get<std::vector<double>>();
      m.table = CumulativeHazardTable(knots, values);
      m.normalization = NormalizationFromJson(doc.at("normalization"));
      const json& report = doc.at("fit_report");
      m.report.iterations = report.at("iterations").get<int>();
      m.report.converged = report.at("converged").get<bool>();
      m.report.log_likelihood = report.at("log_likelihood").get<std::vector<double>>();
      m.report.w_change = report.value("w_change", std::vector<double>{});
      return m;
    }
    if (kind == "parametric") {
      ParametricModel m;
      m.family = ParseFamily(doc.at("family").get<std::string>());
      m.w = VectorFromJson(doc.at("w"));
      if (!doc.at("shape").is_null()) m.shape = doc.at("shape").get<double>();
      m.normalization = NormalizationFromJson(doc.at("normalization"));
      m.iterations = doc.at("fit_report").at("iterations").get<int>();
      m.log_likelihood = doc.at("fit_report").at("log_likelihood").get<double>();
      return m;
    }
    throw Error(ErrorCode::kParse, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model document: ") + e.what());
  }
}

AnyModel ReadModel(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return ModelFromJson(doc);
}

HetSchema SchemaFromJson(const json& doc) {
  try {
    std::vector<RelationType> relations;
    for (const json& r : doc.at("relations")) {
      relations.push_back({r.at(0).get<std::string>(), r.at(1).get<std::string>(), r.at(2).get<std::string>()});
    }
    return HetSchema(doc.at("node_types").get<std::vector<std::string>>(), std::move(relations));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed schema document: ") + e.what());
  }
}

json SchemaToJson(const HetSchema& schema) {
  json relations = json::array();
  for (const RelationType& r : schema.relations()) relations.push_back({r.src_type, r.label, r.dst_type});
  return {{"node_types", schema.node_types()}, {"relations", relations}};
}

void ParseEdges(std::string_view text, HetNet& net, std::string_view source) {
  ForEachLine(text, [&](std::size_t line, std::string_view content) {
    const auto fields = SplitFields(content, ',');
    if (fields.size() != 3 && fields.size() != 4) {
      ParseFailure(source, line, "expected src,relation,dst[,timestamp]");
    }
    std::optional<Timestamp> timestamp;
    if (fields.size() == 4 && !fields[3].empty()) timestamp = ParseInteger<Timestamp>(fields[3], source, line);
    try {
      net.AddEdge(fields[0], fields[1], fields[2], timestamp);
    } catch (const Error& e) {
      ParseFailure(source, line, e.what());
    }
  });
}

std::string FormatEdges(const HetNet& net) {
  std::string out;
  for (const HetEdge& e : net.edges()) {
    out += net.Name(e.src) + "," + net.schema().relations()[e.relation].label + "," + net.Name(e.dst);
    if (e.timestamp) out += "," + std::to_string(*e.timestamp);
    out += '\n';
  }
  return out;
}

std::vector<MetaPath> ParseMetaPaths(std::string_view text, const HetSchema& schema) {
  std::vector<MetaPath> paths;
  ForEachLine(text, [&](std::size_t, std::string_view content) { paths.push_back(MetaPath::Parse(content, schema)); });
  return paths;
}

std::string FormatTable(const StudyTable& table, char delimiter) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += delimiter;
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += delimiter;
      out += FormatDouble(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string FormatReportTable(const EvalReport& report, char delimiter) {
  std::string out = "model";
  const auto add = [&](const std::string& column) {
    out += delimiter;
    out += column;
  };
  for (const char* metric : {"mae", "mre"}) {
    add(std::string(metric) + "_mean");
    add(std::string(metric) + "_std");
  }
  for (const Interval& iv : report.intervals) {
    const std::string name = "ci_" + std::to_string(static_cast<int>(std::lround(iv.lower * 100))) + "_" +
                             std::to_string(static_cast<int>(std::lround(iv.upper * 100)));
    add(name + "_mean");
    add(name + "_std");
  }
  out += '\n';
  for (const ModelReport& row : report.models) {
    out += row.tag;
    for (const Summary* s : {&row.mae, &row.mre}) {
      add(FormatDouble(s->mean));
      add(FormatDouble(s->std));
    }
    for (const Summary& s : row.ci) {
      add(FormatDouble(s.mean));
      add(FormatDouble(s.std));
    }
    out += '\n';
  }
  return out;
}

json ReportToJson(const EvalReport& report) {
  json intervals = json::array();
  for (const Interval& iv : report.intervals) intervals.push_back({iv.lower, iv.upper});
  json models = json::array();
  for (const ModelReport& row : report.models) {
    json folds = json::array();
    for (const FoldMetrics& f : row.folds) {
      folds.push_back({{"mae", f.mae},
                       {"mre", f.mre},
                       {"ci_accuracy", f.ci},
                       {"test_observed", f.test_observed},
                       {"capped_at_window_end", f.capped}});
    }
    json ci = json::array();
    for (const Summary& s : row.ci) ci.push_back({{"mean", s.mean}, {"std", s.std}});
    models.push_back({{"model", row.tag},
                      {"mae", {{"mean", row.mae.mean}, {"std", row.mae.std}}},
                      {"mre", {{"mean", row.mre.mean}, {"std", row.mre.std}}},
                      {"ci_accuracy", ci},
                      {"folds", folds}});
  }
  return {{"folds", report.k},
          {"seed", report.seed},
          {"samples", report.samples},
          {"observed", report.observed},
          {"scored_samples", "observed test samples only"},
          {"assumptions",
           {"pow baseline hazard is gamma * t^(gamma - 1) with gamma fitted by maximum likelihood",
            "gom baseline hazard is e^t with unit rate"}},
          {"intervals", intervals},
          {"models", models}};
}

}  // namespace npglm::io
