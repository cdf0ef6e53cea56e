#include "t3f/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "t3f/error.hpp"
#include "t3f/text.hpp"

namespace fs = std::filesystem;

namespace t3f {

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.label().value_or(-1));
  return out;
}

void Dataset::validate() const {
  if (graphs.empty()) throw Error(ErrorCode::EmptyGraph, "dataset '" + name + "' has no graphs");
  if (graph_ids.size() != graphs.size() || provided_features.size() != graphs.size()) {
    throw Error(ErrorCode::InvalidSpec, "dataset bookkeeping arrays differ in length");
  }
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto label = graphs[i].label();
    if (!label || *label < 0 || static_cast<std::size_t>(*label) >= num_classes) {
      throw Error(ErrorCode::LabelOutOfRange,
                  "graph '" + graph_ids[i] + "' label outside [0," + std::to_string(num_classes) + ")");
    }
  }
}

namespace {

DenseMatrix read_feature_file(const fs::path& path, std::size_t num_nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open feature file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    for (const auto f : text::split_ws(body)) {
      const auto v = text::parse_double(f);
      if (!v) throw ParseError(path.string(), line_no, "bad feature value");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string(), line_no, "ragged feature rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != num_nodes) {
    throw ParseError(path.string(), line_no,
                     "expected " + std::to_string(num_nodes) + " feature rows, got " +
                         std::to_string(rows.size()));
  }
  DenseMatrix m(num_nodes, rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  return m;
}

}  // namespace

Dataset load_dataset(const std::string& directory) {
  const fs::path dir(directory);
  const fs::path manifest = dir / kManifestName;
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::MissingManifest, "no " + manifest.string());

  Dataset ds;
  ds.name = dir.filename().string();
  if (ds.name.empty()) ds.name = dir.parent_path().filename().string();
  std::optional<std::size_t> declared_classes;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split_ws(body);
    if (fields.size() == 2 && fields[0] == "classes") {
      const auto k = text::parse_int(fields[1]);
      if (!k || *k < 1) throw ParseError(manifest.string(), line_no, "bad class count");
      declared_classes = static_cast<std::size_t>(*k);
      continue;
    }
    if (fields.size() == 2 && fields[0] == "name") {
      ds.name = std::string(fields[1]);
      continue;
    }
    if (fields.size() != 1) throw ParseError(manifest.string(), line_no, "expected a file name");
    const fs::path file = dir / std::string(fields[0]);
    TemporalGraph g = read_temporal_graph_file(file.string());
    if (!g.label()) {
      throw Error(ErrorCode::LabelOutOfRange, file.string() + ": graph has no label");
    }
    std::optional<DenseMatrix> features;
    const fs::path feature_file = file.string() + ".features";
    if (fs::exists(feature_file)) features = read_feature_file(feature_file, g.num_nodes());

    std::string id = file.stem().string();
    ds.graphs.push_back(std::move(g));
    ds.graph_ids.push_back(std::move(id));
    ds.provided_features.push_back(std::move(features));
  }
  if (ds.graphs.empty()) throw Error(ErrorCode::EmptyGraph, manifest.string() + " lists no graphs");

  int max_label = 0;
  for (const auto& g : ds.graphs) max_label = std::max(max_label, *g.label());
  ds.num_classes = declared_classes.value_or(static_cast<std::size_t>(max_label) + 1);
  ds.validate();
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& directory) {
  const fs::path dir(directory);
  fs::create_directories(dir);
  std::ofstream manifest(dir / kManifestName);
  if (!manifest) throw Error(ErrorCode::MissingManifest, "cannot write manifest in " + directory);
  manifest << "name " << dataset.name << '\n' << "classes " << dataset.num_classes << '\n';
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    const std::string file = dataset.graph_ids[i] + ".txt";
    manifest << file << '\n';
    std::ofstream out(dir / file);
    write_temporal_graph(out, dataset.graphs[i]);
    if (i < dataset.provided_features.size() && dataset.provided_features[i]) {
      std::ofstream feat(dir / (file + ".features"));
      const auto& m = *dataset.provided_features[i];
      for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
          feat << (c ? " " : "") << text::format_double(m(r, c));
        }
        feat << '\n';
      }
    }
  }
}

}  // namespace t3f
