#include "t3f/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "t3f/error.hpp"

namespace t3f::nn {

using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
  return json{{"node_feature_dim", c.node_feature_dim},
              {"topo_dim", c.topo_dim},
              {"dos_bins", c.dos_bins},
              {"sage_layers", c.sage_layers},
              {"sage_hidden", c.sage_hidden},
              {"d_model", c.d_model},
              {"heads", c.heads},
              {"encoder_layers", c.encoder_layers},
              {"ffn_dim", c.ffn_dim},
              {"view_dim", c.view_dim},
              {"num_classes", c.num_classes},
              {"dropout", c.dropout},
              {"mode", std::string(to_string(c.mode))}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.node_feature_dim = j.at("node_feature_dim").get<std::size_t>();
  c.topo_dim = j.at("topo_dim").get<std::size_t>();
  c.dos_bins = j.at("dos_bins").get<std::size_t>();
  c.sage_layers = j.at("sage_layers").get<std::size_t>();
  c.sage_hidden = j.at("sage_hidden").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.encoder_layers = j.at("encoder_layers").get<std::size_t>();
  c.ffn_dim = j.at("ffn_dim").get<std::size_t>();
  c.view_dim = j.at("view_dim").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.mode = parse_fusion_mode(j.at("mode").get<std::string>());
  return c;
}

}  // namespace

Checkpoint make_checkpoint(const Model& model, std::map<std::string, std::string> metadata) {
  Checkpoint ck;
  ck.config = model.config();
  ck.metadata = std::move(metadata);
  for (const auto& [name, t] : model.params().entries()) {
    ck.params.push_back(
        NamedArray{name, t.rows(), t.cols(), std::vector<double>(t.data().begin(), t.data().end())});
  }
  return ck;
}

Model restore_model(const Checkpoint& checkpoint) {
  Model model(checkpoint.config, 0);
  auto& entries = model.params().entries();
  if (entries.size() != checkpoint.params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "checkpoint holds " +
                                              std::to_string(checkpoint.params.size()) +
                                              " arrays, model has " + std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& [name, t] = entries[i];
    const auto& a = checkpoint.params[i];
    if (a.name != name || a.rows != t.rows() || a.cols != t.cols() || a.data.size() != t.size()) {
      throw Error(ErrorCode::ShapeMismatch, "checkpoint array '" + a.name +
                                                "' does not match model parameter '" + name + "'");
    }
    std::copy(a.data.begin(), a.data.end(), t.mutable_data().begin());
  }
  return model;
}

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  json params = json::array();
  for (const auto& a : checkpoint.params) {
    params.push_back(json{{"name", a.name}, {"rows", a.rows}, {"cols", a.cols}, {"data", a.data}});
  }
  json doc{{"format", "t3f-checkpoint"},
           {"version", Checkpoint::kVersion},
           {"model", config_to_json(checkpoint.config)},
           {"metadata", checkpoint.metadata},
           {"params", std::move(params)}};
  return doc.dump();
}

Checkpoint checkpoint_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "t3f-checkpoint") {
      throw Error(ErrorCode::ParseError, "not a t3f checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != Checkpoint::kVersion) {
      throw Error(ErrorCode::ParseError, "unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ck;
    ck.config = config_from_json(doc.at("model"));
    ck.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& p : doc.at("params")) {
      NamedArray a;
      a.name = p.at("name").get<std::string>();
      a.rows = p.at("rows").get<std::size_t>();
      a.cols = p.at("cols").get<std::size_t>();
      a.data = p.at("data").get<std::vector<double>>();
      if (a.data.size() != a.rows * a.cols) {
        throw Error(ErrorCode::ParseError, "checkpoint array '" + a.name + "' has wrong length");
      }
      ck.params.push_back(std::move(a));
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("checkpoint: ") + e.what());
  }
}

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << checkpoint_to_json(checkpoint) << '\n';
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace t3f::nn
