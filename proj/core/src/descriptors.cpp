#include "t3f/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "t3f/error.hpp"
#include "t3f/text.hpp"

namespace fs = std::filesystem;

namespace t3f {

GraphDescriptors describe_graph(const TemporalGraph& graph, const WindowSpec& spec,
                                std::size_t dos_bins, bool count_multiplicity) {
  GraphDescriptors d;
  for (const auto& w : window_sequence(graph, spec)) {
    d.topo.push_back(topo_descriptor(w, count_multiplicity));
    d.dos.push_back(spectral_descriptor(w, dos_bins));
  }
  return d;
}

DescriptorTable compute_descriptors(const Dataset& dataset, const WindowSpec& spec,
                                    std::size_t dos_bins, bool count_multiplicity) {
  DescriptorTable table;
  table.spec = spec;
  table.dos_bins = dos_bins;
  table.count_multiplicity = count_multiplicity;
  for (const auto& g : dataset.graphs) {
    auto d = describe_graph(g, spec, dos_bins, count_multiplicity);
    table.topo.push_back(std::move(d.topo));
    table.dos.push_back(std::move(d.dos));
  }
  return table;
}

namespace {

constexpr const char* kTopoCsv = "topo.csv";
constexpr const char* kDosCsv = "dos.csv";
constexpr const char* kMetaFile = "descriptors.meta";

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[std::string(text::trim(std::string_view(line).substr(0, eq)))] =
        std::string(text::trim(std::string_view(line).substr(eq + 1)));
  }
  return kv;
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) {
    if (!s.empty()) s += ' ';
    s += id;
  }
  return s;
}

}  // namespace

void write_descriptor_csv(const DescriptorTable& table, const std::vector<std::string>& graph_ids,
                          const std::string& directory) {
  if (graph_ids.size() != table.topo.size()) {
    throw Error(ErrorCode::InvalidSpec, "descriptor table and id list differ in length");
  }
  const fs::path dir(directory);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / kTopoCsv);
    out << "graph_id,window_index,v,e,b0,b1\n";
    for (std::size_t g = 0; g < table.topo.size(); ++g) {
      for (std::size_t w = 0; w < table.topo[g].size(); ++w) {
        const auto& d = table.topo[g][w];
        out << graph_ids[g] << ',' << w << ',' << d.v_count << ',' << d.e_count << ',' << d.betti0
            << ',' << d.betti1 << '\n';
      }
    }
  }
  {
    std::ofstream out(dir / kDosCsv);
    out << "graph_id,window_index";
    for (std::size_t b = 0; b < table.dos_bins; ++b) out << ",dos_" << b;
    out << ",empty_flag\n";
    for (std::size_t g = 0; g < table.dos.size(); ++g) {
      for (std::size_t w = 0; w < table.dos[g].size(); ++w) {
        const auto& h = table.dos[g][w];
        out << graph_ids[g] << ',' << w;
        for (const double m : h.mass) out << ',' << text::format_double(m);
        out << ',' << (h.empty ? 1 : 0) << '\n';
      }
    }
  }
  std::ofstream meta(dir / kMetaFile);
  meta << "delta = " << text::format_double(table.spec.delta) << '\n'
       << "sigma = " << text::format_double(table.spec.sigma) << '\n'
       << "dos_bins = " << table.dos_bins << '\n'
       << "count_multiplicity = " << (table.count_multiplicity ? 1 : 0) << '\n'
       << "graph_ids = " << join_ids(graph_ids) << '\n';
}

bool descriptor_cache_matches(const std::string& directory, const std::vector<std::string>& graph_ids,
                              const WindowSpec& spec, std::size_t dos_bins,
                              bool count_multiplicity) {
  const fs::path dir(directory);
  if (!fs::exists(dir / kMetaFile) || !fs::exists(dir / kTopoCsv) || !fs::exists(dir / kDosCsv)) {
    return false;
  }
  const auto kv = read_meta(dir / kMetaFile);
  const auto get = [&](const char* k) {
    const auto it = kv.find(k);
    return it == kv.end() ? std::string() : it->second;
  };
  return get("delta") == text::format_double(spec.delta) &&
         get("sigma") == text::format_double(spec.sigma) &&
         get("dos_bins") == std::to_string(dos_bins) &&
         get("count_multiplicity") == (count_multiplicity ? "1" : "0") &&
         get("graph_ids") == join_ids(graph_ids);
}

DescriptorTable read_descriptor_csv(const std::string& directory,
                                    const std::vector<std::string>& graph_ids) {
  const fs::path dir(directory);
  const auto kv = read_meta(dir / kMetaFile);
  DescriptorTable table;
  try {
    table.spec = WindowSpec::make(*text::parse_double(kv.at("delta")),
                                  *text::parse_double(kv.at("sigma")));
    table.dos_bins = static_cast<std::size_t>(*text::parse_int(kv.at("dos_bins")));
    table.count_multiplicity = kv.at("count_multiplicity") == "1";
  } catch (const std::exception&) {
    throw ParseError((dir / kMetaFile).string(), 0, "incomplete descriptor metadata");
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph_ids.size(); ++i) index[graph_ids[i]] = i;
  table.topo.assign(graph_ids.size(), {});
  table.dos.assign(graph_ids.size(), {});

  const auto lookup = [&](std::string_view id, const fs::path& file, std::size_t line) {
    const auto it = index.find(std::string(id));
    if (it == index.end()) throw ParseError(file.string(), line, "unknown graph id");
    return it->second;
  };

  {
    const fs::path file = dir / kTopoCsv;
    std::ifstream in(file);
    std::string line;
    std::size_t line_no = 0;
    std::getline(in, line);
    ++line_no;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto f = text::split(line, ',');
      if (f.size() != 6) throw ParseError(file.string(), line_no, "expected 6 columns");
      const std::size_t g = lookup(f[0], file, line_no);
      const auto w = text::parse_int(f[1]);
      if (!w || static_cast<std::size_t>(*w) != table.topo[g].size()) {
        throw ParseError(file.string(), line_no, "window rows out of order");
      }
      TopoDescriptor d;
      std::int64_t* fields[] = {&d.v_count, &d.e_count, &d.betti0, &d.betti1};
      for (int k = 0; k < 4; ++k) {
        const auto v = text::parse_int(f[2 + k]);
        if (!v) throw ParseError(file.string(), line_no, "bad integer");
        *fields[k] = *v;
      }
      table.topo[g].push_back(d);
    }
  }
  {
    const fs::path file = dir / kDosCsv;
    std::ifstream in(file);
    std::string line;
    std::size_t line_no = 0;
    std::getline(in, line);
    ++line_no;
    const auto empty_template = dos_histogram({}, table.dos_bins);
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto f = text::split(line, ',');
      if (f.size() != table.dos_bins + 3) {
        throw ParseError(file.string(), line_no, "wrong column count");
      }
      const std::size_t g = lookup(f[0], file, line_no);
      const auto w = text::parse_int(f[1]);
      if (!w || static_cast<std::size_t>(*w) != table.dos[g].size()) {
        throw ParseError(file.string(), line_no, "window rows out of order");
      }
      DosHistogram h = empty_template;
      for (std::size_t b = 0; b < table.dos_bins; ++b) {
        const auto v = text::parse_double(f[2 + b]);
        if (!v) throw ParseError(file.string(), line_no, "bad mass");
        h.mass[b] = *v;
      }
      h.empty = text::trim(f.back()) == "1";
      table.dos[g].push_back(std::move(h));
    }
  }
  for (std::size_t g = 0; g < graph_ids.size(); ++g) {
    if (table.topo[g].empty() || table.topo[g].size() != table.dos[g].size()) {
      throw ParseError(directory, 0, "missing descriptors for graph " + graph_ids[g]);
    }
  }
  return table;
}

std::vector<double> dataset_timestep_grid(const Dataset& dataset) {
  std::vector<double> grid;
  for (const auto& g : dataset.graphs) {
    for (const auto& e : g.events()) grid.push_back(e.t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

void apply_scaling(DenseMatrix& m, TokenScaling scaling) {
  if (scaling == TokenScaling::Log1p) {
    for (double& x : m.data()) x = std::log1p(std::max(x, 0.0));
  }
}

}  // namespace

nn::GraphSample make_sample(const TemporalGraph& graph, const GraphDescriptors& d,
                            const RunConfig& config, const std::vector<double>& timestep_grid,
                            const std::optional<DenseMatrix>& provided_features) {
  nn::GraphSample s;
  s.label = graph.label().value_or(-1);
  s.graph = static_projection(graph);

  switch (config.feature_mode) {
    case FeatureMode::TemporalDegree:
      s.node_features = temporal_degree(graph, timestep_grid);
      apply_scaling(s.node_features, config.token_scaling);
      break;
    case FeatureMode::Binary:
      s.node_features = binarize(temporal_degree(graph, timestep_grid));
      break;
    case FeatureMode::Provided:
      if (!provided_features) {
        throw Error(ErrorCode::InvalidSpec, "feature_mode = provided but a graph has no features");
      }
      s.node_features = *provided_features;
      break;
  }

  const std::size_t n = d.topo.size();
  s.topo_tokens = DenseMatrix(n, 4);
  for (std::size_t w = 0; w < n; ++w) {
    const auto& t = d.topo[w];
    s.topo_tokens(w, 0) = static_cast<double>(t.v_count);
    s.topo_tokens(w, 1) = static_cast<double>(t.e_count);
    s.topo_tokens(w, 2) = static_cast<double>(t.betti0);
    s.topo_tokens(w, 3) = static_cast<double>(t.betti1);
  }
  apply_scaling(s.topo_tokens, config.token_scaling);

  const std::size_t bins = d.dos.empty() ? config.dos_bins : d.dos.front().bin_count();
  s.dos_tokens = DenseMatrix(n, bins);
  for (std::size_t w = 0; w < n; ++w) {
    std::copy(d.dos[w].mass.begin(), d.dos[w].mass.end(), s.dos_tokens.row(w).begin());
  }
  return s;
}

ExtractedDataset extract_descriptors(const Dataset& dataset, const RunConfig& config,
                                     const std::string& cache_dir,
                                     const std::vector<double>* timestep_grid) {
  config.validate();
  dataset.validate();
  const WindowSpec spec = config.window_spec();

  ExtractedDataset out;
  if (!cache_dir.empty() && descriptor_cache_matches(cache_dir, dataset.graph_ids, spec,
                                                     config.dos_bins, config.count_multiplicity)) {
    out.table = read_descriptor_csv(cache_dir, dataset.graph_ids);
    out.cache_hit = true;
  } else {
    out.table = compute_descriptors(dataset, spec, config.dos_bins, config.count_multiplicity);
    if (!cache_dir.empty()) write_descriptor_csv(out.table, dataset.graph_ids, cache_dir);
  }

  out.timestep_grid = timestep_grid ? *timestep_grid : dataset_timestep_grid(dataset);
  for (std::size_t g = 0; g < dataset.size(); ++g) {
    const GraphDescriptors d{out.table.topo[g], out.table.dos[g]};
    out.samples.push_back(
        make_sample(dataset.graphs[g], d, config, out.timestep_grid, dataset.provided_features[g]));
  }
  out.node_feature_dim = out.samples.front().node_features.cols();
  for (const auto& s : out.samples) {
    if (s.node_features.cols() != out.node_feature_dim) {
      throw Error(ErrorCode::ShapeMismatch, "node feature widths differ across graphs");
    }
  }
  return out;
}

}  // namespace t3f
